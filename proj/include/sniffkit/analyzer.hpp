// analyzer.hpp - streaming header analysis
//
// Decodes L2/L3/L4 header parameters from a frame and verifies the level-3
// and level-4 checksums. The decoded bundle (header_summary) is what the
// rule engine consumes.

#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sniffkit/bus.hpp"
#include "sniffkit/checksum.hpp"
#include "sniffkit/errors.hpp"
#include "sniffkit/frame.hpp"
#include "sniffkit/util.hpp"

namespace sniffkit {

enum class check_status : std::uint8_t { ok, bad, not_applicable };

inline const char* to_string(check_status s) {
    switch (s) {
        case check_status::ok: return "ok";
        case check_status::bad: return "bad";
        case check_status::not_applicable: return "na";
    }
    return "?";
}

struct header_summary {
    mac_address src_mac{};
    mac_address dst_mac{};
    std::uint16_t lev3_prot = 0;               // EtherType
    std::optional<std::uint8_t> lev4_prot;     // present iff IPv4
    std::optional<std::uint32_t> src_ip;       // present iff IPv4
    std::optional<std::uint32_t> dst_ip;
    std::optional<std::uint16_t> src_port;     // present iff TCP/UDP
    std::optional<std::uint16_t> dst_port;
    check_status l3_checksum = check_status::not_applicable;
    check_status l4_checksum = check_status::not_applicable;
    std::size_t frame_len = 0;
};

namespace detail {

// Byte-offset map of a frame's declared headers. truncated_at is set when
// the frame is too short for what its headers declare.
struct frame_layout {
    std::optional<layer> truncated_at;
    bool is_ip = false;
    bool is_arp = false;
    std::uint8_t proto = 0;
    std::size_t ihl_bytes = 0;
    std::size_t l4_off = 0;
    std::size_t l4_len = 0;  // checksummed L4 segment length
    bool has_ports = false;
};

inline frame_layout parse_layout(const ethernet_frame& frame) {
    frame_layout out;
    const auto& b = frame.bytes;
    if (b.size() < eth_header_len) {
        out.truncated_at = layer::l2;
        return out;
    }
    const std::uint16_t ethertype = load_be16(&b[12]);
    out.is_arp = ethertype == ethertype_arp;
    if (ethertype != ethertype_ipv4) return out;

    out.is_ip = true;
    if (b.size() < eth_header_len + ipv4_header_len) {
        out.truncated_at = layer::l3;
        return out;
    }
    const std::uint8_t version = b[eth_header_len] >> 4;
    const std::size_t ihl_bytes = static_cast<std::size_t>(b[eth_header_len] & 0x0F) * 4;
    const std::uint16_t total_length = load_be16(&b[eth_header_len + 2]);
    if (version != 4 || ihl_bytes < ipv4_header_len || total_length < ihl_bytes ||
        b.size() < eth_header_len + ihl_bytes ||
        b.size() < eth_header_len + total_length) {
        out.truncated_at = layer::l3;
        return out;
    }
    out.ihl_bytes = ihl_bytes;
    out.proto = b[eth_header_len + 9];
    out.l4_off = eth_header_len + ihl_bytes;
    out.l4_len = total_length - ihl_bytes;

    if (out.proto == proto_tcp) {
        if (out.l4_len < tcp_header_len) {
            out.truncated_at = layer::l4;
            return out;
        }
        const std::size_t data_offset = static_cast<std::size_t>(b[out.l4_off + 12] >> 4) * 4;
        if (data_offset < tcp_header_len || data_offset > out.l4_len) {
            out.truncated_at = layer::l4;
            return out;
        }
        out.has_ports = true;
    } else if (out.proto == proto_udp) {
        if (out.l4_len < udp_header_len) {
            out.truncated_at = layer::l4;
            return out;
        }
        // the checksummed datagram is what the UDP length field declares
        const std::uint16_t udp_len = load_be16(&b[out.l4_off + 4]);
        if (udp_len < udp_header_len || udp_len > out.l4_len) {
            out.truncated_at = layer::l4;
            return out;
        }
        out.l4_len = udp_len;
        out.has_ports = true;
    } else if (out.proto == proto_icmp) {
        if (out.l4_len < 4) {
            out.truncated_at = layer::l4;
            return out;
        }
    }
    return out;
}

// (l3, l4) verification for an already-laid-out frame. Verification sums
// the stored checksum along with the data: a correct field makes the
// folded complement zero.
inline std::pair<check_status, check_status> checksum_pair(const ethernet_frame& frame,
                                                           const frame_layout& layout) {
    if (!layout.is_ip || layout.truncated_at == layer::l2) {
        return {check_status::not_applicable, check_status::not_applicable};
    }
    if (layout.truncated_at == layer::l3) {
        return {check_status::bad, check_status::not_applicable};
    }

    const auto& b = frame.bytes;
    const check_status l3 =
        internet_checksum({&b[eth_header_len], layout.ihl_bytes}) == 0 ? check_status::ok
                                                                       : check_status::bad;
    if (layout.truncated_at == layer::l4) return {l3, check_status::bad};

    check_status l4 = check_status::not_applicable;
    if (layout.proto == proto_tcp || layout.proto == proto_udp) {
        const std::uint16_t stored = layout.proto == proto_udp
                                         ? load_be16(&b[layout.l4_off + 6])
                                         : load_be16(&b[layout.l4_off + 16]);
        if (layout.proto == proto_udp && stored == 0) {
            // sender opted out of the UDP checksum
            l4 = check_status::not_applicable;
        } else {
            checksum_accumulator acc;
            acc.add_u32(load_be32(&b[eth_header_len + 12]));
            acc.add_u32(load_be32(&b[eth_header_len + 16]));
            acc.add_u16(layout.proto);
            acc.add_u16(static_cast<std::uint16_t>(layout.l4_len));
            acc.add({&b[layout.l4_off], layout.l4_len});
            l4 = acc.finish() == 0 ? check_status::ok : check_status::bad;
        }
    } else if (layout.proto == proto_icmp) {
        l4 = internet_checksum({&b[layout.l4_off], layout.l4_len}) == 0 ? check_status::ok
                                                                        : check_status::bad;
    }
    return {l3, l4};
}

}  // namespace detail

/// Decodes the header parameter bundle of one frame. Throws
/// malformed_frame_error when the frame is shorter than its declared
/// headers.
inline header_summary analyze(const ethernet_frame& frame) {
    const detail::frame_layout layout = detail::parse_layout(frame);
    if (layout.truncated_at) {
        throw malformed_frame_error("frame too short for declared headers",
                                    *layout.truncated_at);
    }
    const auto& b = frame.bytes;
    header_summary out;
    std::copy_n(b.begin(), 6, out.dst_mac.octets.begin());
    std::copy_n(b.begin() + 6, 6, out.src_mac.octets.begin());
    out.lev3_prot = load_be16(&b[12]);
    out.frame_len = frame.declared_len();
    if (layout.is_ip) {
        out.lev4_prot = layout.proto;
        out.src_ip = load_be32(&b[eth_header_len + 12]);
        out.dst_ip = load_be32(&b[eth_header_len + 16]);
        if (layout.has_ports) {
            out.src_port = load_be16(&b[layout.l4_off]);
            out.dst_port = load_be16(&b[layout.l4_off + 2]);
        }
    }
    auto [l3, l4] = detail::checksum_pair(frame, layout);
    out.l3_checksum = l3;
    out.l4_checksum = l4;
    return out;
}

/// Level-4 internet checksum of a TCP or UDP frame, computed over the
/// pseudo-header and the L4 segment with the stored checksum treated as
/// zero. For UDP a computed 0x0000 is reported as 0xFFFF.
inline std::uint16_t l4_checksum(const ethernet_frame& frame) {
    const detail::frame_layout layout = detail::parse_layout(frame);
    if (layout.truncated_at) {
        throw malformed_frame_error("frame too short for declared headers",
                                    *layout.truncated_at);
    }
    if (!layout.is_ip || (layout.proto != proto_tcp && layout.proto != proto_udp)) {
        throw not_applicable_error("l4 checksum applies to TCP or UDP frames only");
    }
    const auto& b = frame.bytes;
    const std::size_t checksum_off = layout.proto == proto_udp ? 6 : 16;
    checksum_accumulator acc;
    acc.add_u32(load_be32(&b[eth_header_len + 12]));
    acc.add_u32(load_be32(&b[eth_header_len + 16]));
    acc.add_u16(layout.proto);
    acc.add_u16(static_cast<std::uint16_t>(layout.l4_len));
    acc.add({&b[layout.l4_off], checksum_off});
    acc.add_u16(0);  // stored checksum treated as zero
    acc.add({&b[layout.l4_off + checksum_off + 2], layout.l4_len - checksum_off - 2});
    std::uint16_t sum = acc.finish();
    if (layout.proto == proto_udp && sum == 0) sum = 0xFFFF;
    return sum;
}

/// (l3, l4) checksum status of a frame. Never throws: truncated headers
/// report bad at the truncated layer, absent headers report not-applicable.
inline std::pair<check_status, check_status> verify_checksums(const ethernet_frame& frame) {
    return detail::checksum_pair(frame, detail::parse_layout(frame));
}

struct stream_analysis {
    struct frame_error {
        std::size_t frame_index;  // arrival position in the stream
        std::string reason;
    };
    std::vector<header_summary> summaries;
    std::vector<frame_error> errors;
};

/// Runs the receive pipeline over a beat stream: reassemble frames, then
/// analyze each one. Well-formed frames yield summaries in arrival order;
/// user-flagged and malformed frames yield error records instead.
inline stream_analysis analyze_stream(const beat_stream& stream, const bus_config& cfg) {
    const deserialized_stream frames = deserialize_stream(stream, cfg.word_bytes);
    stream_analysis out;
    for (std::size_t idx : frames.errored) {
        out.errors.push_back({idx, "user error flag set"});
    }
    for (std::size_t i = 0; i < frames.frames.size(); ++i) {
        try {
            out.summaries.push_back(analyze(frames.frames[i]));
        } catch (const malformed_frame_error& e) {
            out.errors.push_back({frames.frame_indices[i], e.what()});
        }
    }
    std::sort(out.errors.begin(), out.errors.end(),
              [](const auto& a, const auto& b) { return a.frame_index < b.frame_index; });
    return out;
}

}  // namespace sniffkit
