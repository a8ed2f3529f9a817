// bus.hpp - word-parallel streaming bus model
//
// One beat is one clock cycle's transfer: up to word_bytes of data, a keep
// bitmask marking which bytes are valid, a last flag on the final beat of a
// frame and a user flag signalling an errored frame.

#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sniffkit/errors.hpp"
#include "sniffkit/frame.hpp"
#include "sniffkit/util.hpp"

namespace sniffkit {

inline constexpr std::size_t max_word_bytes = 64;

struct bus_config {
    std::size_t word_bytes = 8;  // 8 (10G) or 64 (100G)
    std::uint64_t clock_hz = 156'250'000;
    std::uint64_t line_rate_bps = 10'000'000'000ULL;
    // Inter-frame cycles inserted by the MAC layer. Defaults cover preamble
    // plus minimum IFG rounded up to whole bus words.
    std::uint32_t n_mac = 3;

    static constexpr bus_config rate_10g() { return {8, 156'250'000, 10'000'000'000ULL, 3}; }
    static constexpr bus_config rate_100g() { return {64, 322'260'000, 100'000'000'000ULL, 1}; }

    void validate() const {
        if (word_bytes != 8 && word_bytes != 64) {
            throw spec_error("word_bytes: must be 8 or 64");
        }
        if (clock_hz == 0) throw spec_error("clock_hz: must be positive");
    }
};

struct bus_beat {
    std::array<std::uint8_t, max_word_bytes> data{};
    std::uint64_t keep = 0;  // bit i set <=> data[i] valid
    bool last = false;
    bool user = false;  // error flag
};

/// keep mask with the n low-order bits set; n == 64 yields all ones.
inline constexpr std::uint64_t keep_mask(std::size_t n) {
    return n >= 64 ? ~0ULL : (1ULL << n) - 1;
}

/// Beats of one or more frames plus the idle cycles preceding each frame
/// (the first frame of a stream normally has gap 0).
struct beat_stream {
    std::vector<bus_beat> beats;
    std::vector<std::uint64_t> gaps;
};

/// Splits a frame into ceil(len/word_bytes) beats. All beats are full except
/// possibly the final one, which carries last=true and a keep mask encoding
/// the tail byte count.
inline std::vector<bus_beat> serialize_frame(const ethernet_frame& frame,
                                             const bus_config& cfg) {
    cfg.validate();
    const std::size_t len = frame.declared_len();
    const std::size_t wb = cfg.word_bytes;
    std::vector<bus_beat> beats;
    beats.reserve((len + wb - 1) / wb);
    for (std::size_t off = 0; off < len; off += wb) {
        bus_beat beat;
        const std::size_t chunk = len - off < wb ? len - off : wb;
        std::copy_n(frame.bytes.begin() + static_cast<std::ptrdiff_t>(off), chunk,
                    beat.data.begin());
        beat.keep = keep_mask(chunk);
        beat.last = off + chunk == len;
        beats.push_back(beat);
    }
    return beats;
}

struct deserialized_stream {
    std::vector<ethernet_frame> frames;      // well-formed frames, arrival order
    std::vector<std::size_t> frame_indices;  // arrival index of each entry in frames
    std::vector<std::size_t> errored;        // arrival indices of user-flagged frames
};

/// Reassembles frames from a beat stream; the inverse of serialize_frame.
/// Frames with the user flag set on any beat are dropped and reported via
/// the errored index list. Structural violations (non-contiguous keep, a
/// partial beat before last, an unterminated tail, a frame shorter than the
/// L2 header) raise stream_error with the offending beat index.
inline deserialized_stream deserialize_stream(const beat_stream& stream,
                                              std::size_t word_bytes) {
    if (word_bytes != 8 && word_bytes != 64) {
        throw spec_error("word_bytes: must be 8 or 64");
    }
    deserialized_stream out;
    std::vector<std::uint8_t> bytes;
    bool errored = false;
    std::size_t arrival = 0;
    const std::uint64_t full = keep_mask(word_bytes);

    for (std::size_t i = 0; i < stream.beats.size(); ++i) {
        const bus_beat& beat = stream.beats[i];
        if (beat.keep & ~full) throw stream_error("keep has bits beyond the bus width", i);
        if (!beat.last) {
            if (beat.keep != full) throw stream_error("partial keep before last", i);
        } else {
            if (beat.keep == 0) throw stream_error("empty keep on last beat", i);
            if (beat.keep & (beat.keep + 1)) {
                throw stream_error("keep is not a contiguous low-order run", i);
            }
        }
        const std::size_t valid = static_cast<std::size_t>(std::popcount(beat.keep));
        bytes.insert(bytes.end(), beat.data.begin(),
                     beat.data.begin() + static_cast<std::ptrdiff_t>(valid));
        errored = errored || beat.user;
        if (beat.last) {
            if (errored) {
                out.errored.push_back(arrival);
            } else if (bytes.size() < eth_header_len) {
                throw stream_error("frame shorter than the L2 header", i);
            } else {
                out.frames.push_back(ethernet_frame{std::move(bytes)});
                out.frame_indices.push_back(arrival);
            }
            bytes.clear();
            errored = false;
            ++arrival;
        }
    }
    if (!bytes.empty()) {
        throw stream_error("stream ends inside a frame", stream.beats.size() - 1);
    }
    return out;
}

/// Closed-form cycle count of transmitting the frames back to back:
/// sum over frames of N_FW + N_MAC + N_DELAY, where N_FW is the frame's
/// word count on this bus. Duration in seconds is cycles / clock_hz.
inline std::uint64_t timeline_cycles(std::span<const ethernet_frame> frames,
                                     std::uint64_t n_delay, const bus_config& cfg) {
    std::uint64_t cycles = 0;
    for (const ethernet_frame& frame : frames) {
        cycles += frame_word_count(frame, cfg.word_bytes) + cfg.n_mac + n_delay;
    }
    return cycles;
}

/// Debug dump, one beat per line: hex data, hex keep, last, user.
inline std::string dump_beats(std::span<const bus_beat> beats, std::size_t word_bytes) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    for (const bus_beat& beat : beats) {
        out += to_hex({beat.data.data(), word_bytes});
        out.push_back(' ');
        for (std::size_t i = word_bytes; i > 0; i -= 4) {
            out.push_back(digits[(beat.keep >> (i - 4)) & 0xF]);
        }
        out.push_back(' ');
        out.push_back(beat.last ? '1' : '0');
        out.push_back(' ');
        out.push_back(beat.user ? '1' : '0');
        out.push_back('\n');
    }
    return out;
}

}  // namespace sniffkit
