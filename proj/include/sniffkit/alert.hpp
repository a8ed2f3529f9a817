// alert.hpp - alarm records for frames that fail the rules check
//
// One alert is one line of JSON with a stable key order, delivered to an
// append-only file or fire-and-forget over a UDP datagram.

#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <string_view>

#include <netdb.h>
#include <sys/socket.h>
#include <unistd.h>

#include <json.hpp>

#include "sniffkit/analyzer.hpp"
#include "sniffkit/errors.hpp"
#include "sniffkit/util.hpp"

namespace sniffkit {

struct alert_record {
    double timestamp = 0;  // capture-relative seconds
    header_summary summary;
    std::uint8_t verdict_code = 0;
    std::string reason;  // "no-match", or "matched rule N" when alerting elsewhere
};

inline std::string render_alert_json(const alert_record& record) {
    nlohmann::ordered_json doc;
    doc["timestamp"] = record.timestamp;
    doc["verdict_code"] = record.verdict_code;
    doc["reason"] = record.reason;
    doc["frame_len"] = record.summary.frame_len;
    doc["src_mac"] = record.summary.src_mac.to_string();
    doc["dst_mac"] = record.summary.dst_mac.to_string();
    doc["lev3_prot"] = record.summary.lev3_prot;
    if (record.summary.lev4_prot) doc["lev4_prot"] = *record.summary.lev4_prot;
    if (record.summary.src_ip) doc["src_ip"] = format_ipv4(*record.summary.src_ip);
    if (record.summary.dst_ip) doc["dst_ip"] = format_ipv4(*record.summary.dst_ip);
    if (record.summary.src_port) doc["src_port"] = *record.summary.src_port;
    if (record.summary.dst_port) doc["dst_port"] = *record.summary.dst_port;
    doc["l3_checksum"] = to_string(record.summary.l3_checksum);
    doc["l4_checksum"] = to_string(record.summary.l4_checksum);
    return doc.dump();
}

class alert_sink {
  public:
    virtual ~alert_sink() = default;
    /// Delivers one line; false means the warning counter ticks and
    /// processing continues.
    virtual bool send(std::string_view line) = 0;
};

class file_alert_sink : public alert_sink {
  public:
    explicit file_alert_sink(const std::filesystem::path& path)
        : out_(path, std::ios::app) {
        if (!out_) throw io_error("cannot open alert file " + path.string());
    }

    bool send(std::string_view line) override {
        out_ << line << '\n';
        out_.flush();
        return static_cast<bool>(out_);
    }

  private:
    std::ofstream out_;
};

class udp_alert_sink : public alert_sink {
  public:
    udp_alert_sink(const std::string& host, const std::string& port) {
        addrinfo hints{};
        hints.ai_family = AF_UNSPEC;
        hints.ai_socktype = SOCK_DGRAM;
        addrinfo* result = nullptr;
        if (getaddrinfo(host.c_str(), port.c_str(), &hints, &result) != 0 || !result) {
            throw io_error("cannot resolve alert sink " + host + ":" + port);
        }
        fd_ = ::socket(result->ai_family, result->ai_socktype, result->ai_protocol);
        if (fd_ >= 0 && ::connect(fd_, result->ai_addr, result->ai_addrlen) != 0) {
            ::close(fd_);
            fd_ = -1;
        }
        freeaddrinfo(result);
        if (fd_ < 0) throw io_error("cannot open datagram socket to " + host + ":" + port);
    }

    udp_alert_sink(const udp_alert_sink&) = delete;
    udp_alert_sink& operator=(const udp_alert_sink&) = delete;

    ~udp_alert_sink() override {
        if (fd_ >= 0) ::close(fd_);
    }

    bool send(std::string_view line) override {
        // fire and forget; a full buffer or ICMP-reported failure is a warning
        return ::send(fd_, line.data(), line.size(), 0) ==
               static_cast<ssize_t>(line.size());
    }

  private:
    int fd_ = -1;
};

/// Builds a sink from a CLI spec: "udp:host:port" or a file path.
inline std::unique_ptr<alert_sink> make_alert_sink(const std::string& spec) {
    if (spec.starts_with("udp:")) {
        const std::string rest = spec.substr(4);
        auto colon = rest.rfind(':');
        if (colon == std::string::npos || colon == 0 || colon + 1 == rest.size()) {
            throw io_error("alert sink spec needs udp:<host>:<port>");
        }
        return std::make_unique<udp_alert_sink>(rest.substr(0, colon), rest.substr(colon + 1));
    }
    return std::make_unique<file_alert_sink>(spec);
}

/// Renders and delivers one alert; true on delivery.
inline bool emit_alert(const alert_record& record, alert_sink& sink) {
    return sink.send(render_alert_json(record));
}

}  // namespace sniffkit
