// errors.hpp - exception types thrown across the library

#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace sniffkit {

/// Base class for everything thrown by this library.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Inconsistent frame spec or rule field; the message names the offending field.
struct spec_error : error {
    using error::error;
};

/// Structurally invalid beat stream (bad keep mask, unterminated frame).
struct stream_error : error {
    std::size_t beat_index;
    stream_error(const std::string& msg, std::size_t index)
        : error(msg + " (beat " + std::to_string(index) + ")"), beat_index(index) {}
};

enum class layer : std::uint8_t { l2, l3, l4 };

inline const char* to_string(layer l) {
    switch (l) {
        case layer::l2: return "l2";
        case layer::l3: return "l3";
        case layer::l4: return "l4";
    }
    return "?";
}

/// Frame too short for the headers it declares.
struct malformed_frame_error : error {
    layer truncated_at;
    malformed_frame_error(const std::string& msg, layer at)
        : error(msg + " (truncated at " + to_string(at) + ")"), truncated_at(at) {}
};

/// Text or binary input that does not parse; line is 1-based, 0 when unknown.
struct parse_error : error {
    std::size_t line;
    explicit parse_error(const std::string& msg, std::size_t line_no = 0)
        : error(line_no ? "line " + std::to_string(line_no) + ": " + msg : msg),
          line(line_no) {}
};

/// Ruleset or schedule exceeding a fixed capacity.
struct capacity_error : error {
    using error::error;
};

struct io_error : error {
    using error::error;
};

/// Operation requested on a frame that does not carry the required header.
struct not_applicable_error : error {
    using error::error;
};

/// A 64-bit counter would wrap.
struct counter_overflow_error : error {
    using error::error;
};

}  // namespace sniffkit
