// frame.hpp - Ethernet frame model and builder
//
// Frames carry the MAC-delivered bytes only: L2 header through payload,
// no preamble and no FCS. All multi-byte fields are big-endian.

#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sniffkit/checksum.hpp"
#include "sniffkit/errors.hpp"
#include "sniffkit/util.hpp"

namespace sniffkit {

inline constexpr std::uint16_t ethertype_ipv4 = 0x0800;
inline constexpr std::uint16_t ethertype_arp = 0x0806;

inline constexpr std::uint8_t proto_icmp = 1;
inline constexpr std::uint8_t proto_tcp = 6;
inline constexpr std::uint8_t proto_udp = 17;

inline constexpr std::size_t eth_header_len = 14;
inline constexpr std::size_t ipv4_header_len = 20;  // IHL=5, no options
inline constexpr std::size_t udp_header_len = 8;
inline constexpr std::size_t tcp_header_len = 20;
inline constexpr std::size_t icmp_header_len = 8;
inline constexpr std::size_t arp_body_len = 28;

inline constexpr std::size_t min_frame_len = 64;
inline constexpr std::size_t max_frame_len = 1514;  // 1500 MTU + L2 header

struct mac_address {
    std::array<std::uint8_t, 6> octets{};

    auto operator<=>(const mac_address&) const = default;

    std::string to_string() const {
        static constexpr char digits[] = "0123456789abcdef";
        std::string out;
        out.reserve(17);
        for (std::size_t i = 0; i < 6; ++i) {
            if (i) out.push_back(':');
            out.push_back(digits[octets[i] >> 4]);
            out.push_back(digits[octets[i] & 0xF]);
        }
        return out;
    }

    // "aa:bb:cc:dd:ee:ff"
    static std::optional<mac_address> parse(std::string_view text) {
        if (text.size() != 17) return std::nullopt;
        mac_address out;
        for (std::size_t i = 0; i < 6; ++i) {
            if (i && text[i * 3 - 1] != ':') return std::nullopt;
            auto nibble = [](char c) -> int {
                if (c >= '0' && c <= '9') return c - '0';
                if (c >= 'a' && c <= 'f') return c - 'a' + 10;
                if (c >= 'A' && c <= 'F') return c - 'A' + 10;
                return -1;
            };
            int hi = nibble(text[i * 3]);
            int lo = nibble(text[i * 3 + 1]);
            if (hi < 0 || lo < 0) return std::nullopt;
            out.octets[i] = static_cast<std::uint8_t>((hi << 4) | lo);
        }
        return out;
    }
};

/// Raw frame bytes, L2 header through payload. Producers keep the length at
/// 14 bytes or more; frames built with padding enabled are at least 64.
struct ethernet_frame {
    std::vector<std::uint8_t> bytes;

    std::size_t declared_len() const { return bytes.size(); }

    bool operator==(const ethernet_frame&) const = default;
};

struct frame_spec {
    std::uint16_t l3_protocol = ethertype_ipv4;
    std::optional<std::uint8_t> l4_protocol;  // 6 TCP, 17 UDP, 1 ICMP; required when l3 is IP
    mac_address src_mac{};
    mac_address dst_mac{};
    std::uint32_t src_ip = 0;
    std::uint32_t dst_ip = 0;
    std::optional<std::uint16_t> src_port;  // TCP/UDP only
    std::optional<std::uint16_t> dst_port;
    std::size_t payload_len = 0;
    bool pad_to_minimum = true;
};

/// ceil(declared_len / word_bytes): beats needed on a word_bytes-wide bus.
inline std::uint64_t frame_word_count(const ethernet_frame& frame, std::size_t word_bytes) {
    return (frame.declared_len() + word_bytes - 1) / word_bytes;
}

inline std::uint64_t padded_word_count(std::size_t frame_len, std::size_t word_bytes) {
    std::size_t len = frame_len < min_frame_len ? min_frame_len : frame_len;
    return (len + word_bytes - 1) / word_bytes;
}

namespace detail {

inline void validate_spec(const frame_spec& spec) {
    const bool is_ip = spec.l3_protocol == ethertype_ipv4;
    const bool is_arp = spec.l3_protocol == ethertype_arp;
    if (!is_ip && !is_arp) {
        throw spec_error("l3_protocol: unsupported EtherType");
    }
    if (is_arp) {
        if (spec.l4_protocol) throw spec_error("l4_protocol: not allowed for ARP");
        if (spec.src_port || spec.dst_port) throw spec_error("src_port/dst_port: not allowed for ARP");
        if (spec.payload_len != 0) throw spec_error("payload_len: ARP body is fixed size");
        return;
    }
    if (!spec.l4_protocol) throw spec_error("l4_protocol: required for IP frames");
    const std::uint8_t proto = *spec.l4_protocol;
    if (proto != proto_tcp && proto != proto_udp && proto != proto_icmp) {
        throw spec_error("l4_protocol: unsupported protocol " + std::to_string(proto));
    }
    if ((spec.src_port || spec.dst_port) && proto != proto_tcp && proto != proto_udp) {
        throw spec_error(spec.src_port ? "src_port: ports permitted only for TCP/UDP"
                                       : "dst_port: ports permitted only for TCP/UDP");
    }
    std::size_t l4_header = proto == proto_tcp ? tcp_header_len
                          : proto == proto_udp ? udp_header_len
                                               : icmp_header_len;
    std::size_t total = eth_header_len + ipv4_header_len + l4_header + spec.payload_len;
    if (total > max_frame_len) {
        throw spec_error("payload_len: frame would exceed " + std::to_string(max_frame_len) +
                         " bytes");
    }
}

}  // namespace detail

/// Builds a byte-exact frame from a spec. Deterministic: the payload is the
/// repeating 0x00..0xFF byte ramp and all unspecified header fields are zero
/// (TTL 64). Checksums are filled for IP, TCP, UDP and ICMP.
inline ethernet_frame build_frame(const frame_spec& spec) {
    detail::validate_spec(spec);

    ethernet_frame frame;
    auto& b = frame.bytes;

    const bool is_ip = spec.l3_protocol == ethertype_ipv4;
    const std::uint8_t proto = is_ip ? *spec.l4_protocol : 0;
    const std::size_t l4_header = !is_ip          ? 0
                                : proto == proto_tcp ? tcp_header_len
                                : proto == proto_udp ? udp_header_len
                                                     : icmp_header_len;
    const std::size_t total = is_ip
        ? eth_header_len + ipv4_header_len + l4_header + spec.payload_len
        : eth_header_len + arp_body_len;
    b.resize(total, 0);

    // L2 header: destination, source, EtherType
    std::copy(spec.dst_mac.octets.begin(), spec.dst_mac.octets.end(), b.begin());
    std::copy(spec.src_mac.octets.begin(), spec.src_mac.octets.end(), b.begin() + 6);
    store_be16(&b[12], spec.l3_protocol);

    if (!is_ip) {
        // Fixed-format ARP request body (hardware Ethernet, protocol IPv4)
        std::uint8_t* arp = &b[eth_header_len];
        store_be16(arp + 0, 0x0001);  // htype
        store_be16(arp + 2, ethertype_ipv4);
        arp[4] = 6;  // hlen
        arp[5] = 4;  // plen
        store_be16(arp + 6, 0x0001);  // oper: request
        std::copy(spec.src_mac.octets.begin(), spec.src_mac.octets.end(), arp + 8);
        store_be32(arp + 14, spec.src_ip);
        // target hardware address left zero for a request
        store_be32(arp + 24, spec.dst_ip);
    } else {
        std::uint8_t* ip = &b[eth_header_len];
        const std::size_t ip_total = ipv4_header_len + l4_header + spec.payload_len;
        ip[0] = 0x45;  // version 4, IHL 5
        store_be16(ip + 2, static_cast<std::uint16_t>(ip_total));
        ip[8] = 64;  // TTL
        ip[9] = proto;
        store_be32(ip + 12, spec.src_ip);
        store_be32(ip + 16, spec.dst_ip);
        store_be16(ip + 10, ipv4_header_checksum({ip, ipv4_header_len}));

        std::uint8_t* l4 = ip + ipv4_header_len;
        const std::size_t l4_len = l4_header + spec.payload_len;
        std::uint8_t* payload = l4 + l4_header;
        for (std::size_t i = 0; i < spec.payload_len; ++i) {
            payload[i] = static_cast<std::uint8_t>(i & 0xFF);
        }

        if (proto == proto_udp) {
            store_be16(l4 + 0, spec.src_port.value_or(0));
            store_be16(l4 + 2, spec.dst_port.value_or(0));
            store_be16(l4 + 4, static_cast<std::uint16_t>(l4_len));
            store_be16(l4 + 6,
                       transport_checksum(spec.src_ip, spec.dst_ip, proto, {l4, l4_len}));
        } else if (proto == proto_tcp) {
            store_be16(l4 + 0, spec.src_port.value_or(0));
            store_be16(l4 + 2, spec.dst_port.value_or(0));
            l4[12] = 0x50;  // data offset 5 words, no options
            store_be16(l4 + 16,
                       transport_checksum(spec.src_ip, spec.dst_ip, proto, {l4, l4_len}));
        } else {
            l4[0] = 8;  // echo request
            store_be16(l4 + 2, icmp_checksum({l4, l4_len}));
        }
    }

    // Zero padding to the Ethernet minimum; declared header lengths above
    // keep describing the unpadded frame.
    if (spec.pad_to_minimum && b.size() < min_frame_len) {
        b.resize(min_frame_len, 0);
    }
    return frame;
}

}  // namespace sniffkit
