// config.hpp - generator configuration files
//
// JSON schema:
//   {
//     "bus": "10g" | "100g",          // default "10g"
//     "n_mac": 3,                      // optional MAC gap override
//     "n_delay": 0,
//     "mode": "single" | "continuous", // default "single"
//     "loops": 2,                      // continuous repetitions; omit for unbounded (CLI only)
//     "frames": [ { frame object }, ... ],
//     "port_sweep": { "template": { frame object }, "count": 1024 },
//     "pcap": "capture.pcap"           // replay the frames of a capture file
//   }
// Exactly one of "frames", "port_sweep" and "pcap" selects the frame source.
// Frame object:
//   { "type": "udp"|"tcp"|"icmp"|"arp", "src_mac": "..", "dst_mac": "..",
//     "src_ip": "..", "dst_ip": "..", "src_port": 0, "dst_port": 0,
//     "payload_len": 0, "pad": true }

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "sniffkit/bus.hpp"
#include "sniffkit/errors.hpp"
#include "sniffkit/frame.hpp"
#include "sniffkit/generator.hpp"

namespace sniffkit {

struct gen_config {
    bus_config bus = bus_config::rate_10g();
    std::uint64_t n_delay = 0;
    gen_mode mode = gen_mode::single_loop;
    std::optional<std::uint64_t> loops;      // absent = unbounded continuous
    std::vector<frame_spec> frames;          // from "frames" or "port_sweep"
    std::optional<std::string> pcap_source;  // from "pcap"
};

namespace detail {

inline frame_spec parse_frame_object(const nlohmann::json& obj) {
    if (!obj.is_object()) throw parse_error("frame entry must be an object");
    frame_spec spec;
    const std::string type = obj.value("type", "udp");
    if (type == "udp") spec.l4_protocol = proto_udp;
    else if (type == "tcp") spec.l4_protocol = proto_tcp;
    else if (type == "icmp") spec.l4_protocol = proto_icmp;
    else if (type == "arp") spec.l3_protocol = ethertype_arp;
    else throw parse_error("unknown frame type '" + type + "'");

    auto mac_field = [&](const char* key, mac_address fallback) {
        if (!obj.contains(key)) return fallback;
        auto parsed = mac_address::parse(obj.at(key).get<std::string>());
        if (!parsed) throw parse_error(std::string("bad MAC address in '") + key + "'");
        return *parsed;
    };
    auto ip_field = [&](const char* key, std::uint32_t fallback) {
        if (!obj.contains(key)) return fallback;
        auto parsed = parse_ipv4(obj.at(key).get<std::string>());
        if (!parsed) throw parse_error(std::string("bad IPv4 address in '") + key + "'");
        return *parsed;
    };
    spec.src_mac = mac_field("src_mac", {{0x02, 0, 0, 0, 0, 0x01}});
    spec.dst_mac = mac_field("dst_mac", {{0x02, 0, 0, 0, 0, 0x02}});
    spec.src_ip = ip_field("src_ip", 0xC0A80001);  // 192.168.0.1
    spec.dst_ip = ip_field("dst_ip", 0xC0A80002);
    if (obj.contains("src_port")) spec.src_port = obj.at("src_port").get<std::uint16_t>();
    if (obj.contains("dst_port")) spec.dst_port = obj.at("dst_port").get<std::uint16_t>();
    spec.payload_len = obj.value("payload_len", std::size_t{0});
    spec.pad_to_minimum = obj.value("pad", true);
    return spec;
}

}  // namespace detail

inline gen_config parse_gen_config(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw parse_error(std::string("config is not valid JSON: ") + e.what());
    }
    try {
        gen_config cfg;
        const std::string bus = doc.value("bus", "10g");
        if (bus == "10g") cfg.bus = bus_config::rate_10g();
        else if (bus == "100g") cfg.bus = bus_config::rate_100g();
        else throw parse_error("bus must be '10g' or '100g'");
        if (doc.contains("n_mac")) cfg.bus.n_mac = doc.at("n_mac").get<std::uint32_t>();
        cfg.n_delay = doc.value("n_delay", std::uint64_t{0});

        const std::string mode = doc.value("mode", "single");
        if (mode == "single") cfg.mode = gen_mode::single_loop;
        else if (mode == "continuous") cfg.mode = gen_mode::continuous;
        else if (mode == "stopped") cfg.mode = gen_mode::stopped;
        else throw parse_error("mode must be 'single', 'continuous' or 'stopped'");
        if (doc.contains("loops")) cfg.loops = doc.at("loops").get<std::uint64_t>();

        const bool has_frames = doc.contains("frames");
        const bool has_sweep = doc.contains("port_sweep");
        const bool has_pcap = doc.contains("pcap");
        if (static_cast<int>(has_frames) + static_cast<int>(has_sweep) +
                static_cast<int>(has_pcap) != 1) {
            throw parse_error("config needs exactly one of 'frames', 'port_sweep' or 'pcap'");
        }
        if (has_pcap) {
            cfg.pcap_source = doc.at("pcap").get<std::string>();
        } else if (has_frames) {
            if (doc.at("frames").empty()) throw parse_error("'frames' must not be empty");
            for (const auto& entry : doc.at("frames")) {
                cfg.frames.push_back(detail::parse_frame_object(entry));
            }
        } else {
            const auto& sweep = doc.at("port_sweep");
            frame_spec spec = detail::parse_frame_object(sweep.at("template"));
            const std::size_t count = sweep.at("count").get<std::size_t>();
            if (!spec.l4_protocol ||
                (*spec.l4_protocol != proto_tcp && *spec.l4_protocol != proto_udp)) {
                throw parse_error("port_sweep template must be tcp or udp");
            }
            if (count == 0) throw parse_error("port_sweep count must be positive");
            if (count > 65536) throw parse_error("port_sweep count exceeds 65536");
            cfg.frames.reserve(count);
            for (std::size_t port = 0; port < count; ++port) {
                spec.src_port = static_cast<std::uint16_t>(port);
                cfg.frames.push_back(spec);
            }
        }
        return cfg;
    } catch (const nlohmann::json::exception& e) {
        throw parse_error(std::string("bad config value: ") + e.what());
    }
}

/// Builds the frames of a parsed config. Throws spec_error on an
/// inconsistent frame spec.
inline std::vector<ethernet_frame> build_config_frames(const gen_config& cfg) {
    std::vector<ethernet_frame> out;
    out.reserve(cfg.frames.size());
    for (const frame_spec& spec : cfg.frames) {
        out.push_back(build_frame(spec));
    }
    return out;
}

}  // namespace sniffkit
