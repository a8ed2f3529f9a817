// oracles.hpp - independent reference implementations used only by tests
//
// Everything here recomputes results by a different route than the library
// so the two sides can be checked against each other.

#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "sniffkit/analyzer.hpp"
#include "sniffkit/bus.hpp"
#include "sniffkit/frame.hpp"
#include "sniffkit/generator.hpp"
#include "sniffkit/rules.hpp"

namespace oracles {

// Brute-force internet checksum: fold into 16 bits after every single
// 16-bit word, end-around carry each time. An odd trailing byte pads with
// zero.
inline std::uint16_t internet_checksum(std::span<const std::uint8_t> bytes) {
    std::uint32_t sum = 0;
    for (std::size_t i = 0; i < bytes.size(); i += 2) {
        std::uint16_t word = static_cast<std::uint16_t>(bytes[i] << 8);
        if (i + 1 < bytes.size()) word |= bytes[i + 1];
        sum += word;
        if (sum > 0xFFFF) sum = (sum & 0xFFFF) + 1;
    }
    return static_cast<std::uint16_t>(~sum & 0xFFFF);
}

// Pseudo-header + segment checksum assembled as one flat byte buffer.
inline std::uint16_t transport_checksum(std::uint32_t src_ip, std::uint32_t dst_ip,
                                        std::uint8_t proto,
                                        std::span<const std::uint8_t> segment) {
    std::vector<std::uint8_t> buf;
    buf.reserve(12 + segment.size());
    for (int shift = 24; shift >= 0; shift -= 8) {
        buf.push_back(static_cast<std::uint8_t>((src_ip >> shift) & 0xFF));
    }
    for (int shift = 24; shift >= 0; shift -= 8) {
        buf.push_back(static_cast<std::uint8_t>((dst_ip >> shift) & 0xFF));
    }
    buf.push_back(0);
    buf.push_back(proto);
    buf.push_back(static_cast<std::uint8_t>(segment.size() >> 8));
    buf.push_back(static_cast<std::uint8_t>(segment.size() & 0xFF));
    buf.insert(buf.end(), segment.begin(), segment.end());
    return internet_checksum(buf);
}

// Clause-by-clause whitelist match, written independently of the engine.
inline bool rule_matches(const sniffkit::firewall_rule& r, const sniffkit::header_summary& s) {
    if ((r.flags & 0x01) == 0) return false;
    const bool is_arp = s.lev3_prot == sniffkit::ethertype_arp;
    if (is_arp && (r.flags & 0x02) == 0) return false;

    bool proto_ok = r.l4_proto == 0xFF || (s.lev4_prot && *s.lev4_prot == r.l4_proto);
    bool src_ip_ok = !s.src_ip || ((*s.src_ip & r.src_ip_mask) == (r.src_ip & r.src_ip_mask));
    bool dst_ip_ok = !s.dst_ip || ((*s.dst_ip & r.dst_ip_mask) == (r.dst_ip & r.dst_ip_mask));
    bool sport_ok = !s.src_port || (*s.src_port >= r.src_port_min && *s.src_port <= r.src_port_max);
    bool dport_ok = !s.dst_port || (*s.dst_port >= r.dst_port_min && *s.dst_port <= r.dst_port_max);
    return proto_ok && src_ip_ok && dst_ip_ok && sport_ok && dport_ok;
}

// Steps a generated run one beat per cycle with the recorded gaps plus the
// trailing inter-frame gap; returns per-frame start cycles and the total.
struct stepped_timeline {
    std::vector<std::uint64_t> frame_starts;
    std::uint64_t total_cycles = 0;
};

inline stepped_timeline step_stream(const sniffkit::beat_stream& stream,
                                    std::uint64_t trailing_gap) {
    stepped_timeline out;
    std::uint64_t cycle = 0;
    std::size_t frame = 0;
    bool at_frame_start = true;
    for (const sniffkit::bus_beat& beat : stream.beats) {
        if (at_frame_start) {
            cycle += frame < stream.gaps.size() ? stream.gaps[frame] : 0;
            out.frame_starts.push_back(cycle);
            at_frame_start = false;
        }
        ++cycle;
        if (beat.last) {
            at_frame_start = true;
            ++frame;
        }
    }
    if (frame > 0) cycle += trailing_gap;
    out.total_cycles = cycle;
    return out;
}

// Deterministic random inputs ---------------------------------------------

inline sniffkit::mac_address random_mac(std::mt19937_64& rng) {
    sniffkit::mac_address mac;
    for (auto& octet : mac.octets) octet = static_cast<std::uint8_t>(rng());
    return mac;
}

inline sniffkit::frame_spec random_spec(std::mt19937_64& rng) {
    sniffkit::frame_spec spec;
    spec.src_mac = random_mac(rng);
    spec.dst_mac = random_mac(rng);
    spec.src_ip = static_cast<std::uint32_t>(rng());
    spec.dst_ip = static_cast<std::uint32_t>(rng());
    switch (rng() % 4) {
        case 0:
            spec.l3_protocol = sniffkit::ethertype_arp;
            break;
        case 1:
            spec.l4_protocol = sniffkit::proto_icmp;
            spec.payload_len = rng() % 1200;
            break;
        case 2:
            spec.l4_protocol = sniffkit::proto_tcp;
            spec.src_port = static_cast<std::uint16_t>(rng());
            spec.dst_port = static_cast<std::uint16_t>(rng());
            spec.payload_len = rng() % 1200;
            break;
        default:
            spec.l4_protocol = sniffkit::proto_udp;
            spec.src_port = static_cast<std::uint16_t>(rng());
            spec.dst_port = static_cast<std::uint16_t>(rng());
            spec.payload_len = rng() % 1200;
            break;
    }
    spec.pad_to_minimum = rng() % 2 == 0;
    return spec;
}

inline sniffkit::firewall_rule random_rule(std::mt19937_64& rng) {
    sniffkit::firewall_rule rule;
    rule.src_ip = static_cast<std::uint32_t>(rng());
    rule.dst_ip = static_cast<std::uint32_t>(rng());
    // bias masks toward prefixes but keep arbitrary ones in the mix
    auto mask = [&]() -> std::uint32_t {
        if (rng() % 2) {
            unsigned len = rng() % 33;
            return len == 0 ? 0 : static_cast<std::uint32_t>(0xFFFFFFFFULL << (32 - len));
        }
        return static_cast<std::uint32_t>(rng());
    };
    rule.src_ip_mask = mask();
    rule.dst_ip_mask = mask();
    std::uint16_t a = static_cast<std::uint16_t>(rng());
    std::uint16_t b = static_cast<std::uint16_t>(rng());
    rule.src_port_min = std::min(a, b);
    rule.src_port_max = std::max(a, b);
    a = static_cast<std::uint16_t>(rng());
    b = static_cast<std::uint16_t>(rng());
    rule.dst_port_min = std::min(a, b);
    rule.dst_port_max = std::max(a, b);
    static constexpr std::uint8_t protos[] = {sniffkit::proto_tcp, sniffkit::proto_udp,
                                              sniffkit::proto_icmp, 0xFF, 47};
    rule.l4_proto = protos[rng() % 5];
    rule.flags = static_cast<std::uint8_t>(rng() % 4);  // enabled/arp combinations
    return rule;
}

inline sniffkit::header_summary random_summary(std::mt19937_64& rng) {
    sniffkit::header_summary s;
    s.src_mac = random_mac(rng);
    s.dst_mac = random_mac(rng);
    s.frame_len = 64 + rng() % 1450;
    switch (rng() % 5) {
        case 0:
            s.lev3_prot = sniffkit::ethertype_arp;
            break;
        case 1:
            s.lev3_prot = 0x86DD;  // some non-IP, non-ARP EtherType
            break;
        default: {
            s.lev3_prot = sniffkit::ethertype_ipv4;
            s.src_ip = static_cast<std::uint32_t>(rng());
            s.dst_ip = static_cast<std::uint32_t>(rng());
            static constexpr std::uint8_t protos[] = {sniffkit::proto_tcp, sniffkit::proto_udp,
                                                      sniffkit::proto_icmp, 47};
            s.lev4_prot = protos[rng() % 4];
            if (*s.lev4_prot == sniffkit::proto_tcp || *s.lev4_prot == sniffkit::proto_udp) {
                s.src_port = static_cast<std::uint16_t>(rng());
                s.dst_port = static_cast<std::uint16_t>(rng());
            }
            break;
        }
    }
    return s;
}

}  // namespace oracles
