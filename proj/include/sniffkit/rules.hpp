// rules.hpp - whitelist rule engine
//
// Up to 16 rules (four memories of four 224-bit words in the hardware this
// models) are evaluated against each header summary. Traffic is blocked
// unless some enabled rule matches.

#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "sniffkit/analyzer.hpp"
#include "sniffkit/errors.hpp"
#include "sniffkit/util.hpp"

namespace sniffkit {

inline constexpr std::size_t rule_packed_bytes = 28;  // 224 bits
inline constexpr std::size_t max_rules = 16;          // 4 memories x 4 words

struct firewall_rule {
    static constexpr std::uint8_t flag_enabled = 0x01;
    static constexpr std::uint8_t flag_arp = 0x02;
    static constexpr std::uint8_t proto_any = 0xFF;

    std::uint32_t src_ip = 0;
    std::uint32_t src_ip_mask = 0;  // mask 0 = wildcard
    std::uint32_t dst_ip = 0;
    std::uint32_t dst_ip_mask = 0;
    std::uint16_t src_port_min = 0;
    std::uint16_t src_port_max = 65535;
    std::uint16_t dst_port_min = 0;
    std::uint16_t dst_port_max = 65535;
    std::uint8_t l4_proto = proto_any;
    std::uint8_t flags = flag_enabled;

    bool enabled() const { return flags & flag_enabled; }
    bool matches_arp() const { return flags & flag_arp; }

    bool operator==(const firewall_rule&) const = default;

    void validate() const {
        if (src_port_min > src_port_max) throw spec_error("src_port_min exceeds src_port_max");
        if (dst_port_min > dst_port_max) throw spec_error("dst_port_min exceeds dst_port_max");
    }
};

struct rule_set {
    std::vector<firewall_rule> rules;

    void add(const firewall_rule& rule) {
        rule.validate();
        if (rules.size() >= max_rules) {
            throw capacity_error("rule memory holds at most " + std::to_string(max_rules) +
                                 " rules");
        }
        rules.push_back(rule);
    }
};

/// Packs a rule into its 224-bit memory word: big-endian fields in the order
/// src_ip, src_ip_mask, dst_ip, dst_ip_mask, src_port_min, src_port_max,
/// dst_port_min, dst_port_max, l4_proto, flags, two reserved zero bytes.
inline std::array<std::uint8_t, rule_packed_bytes> pack_rule(const firewall_rule& rule) {
    rule.validate();
    std::array<std::uint8_t, rule_packed_bytes> out{};
    store_be32(&out[0], rule.src_ip);
    store_be32(&out[4], rule.src_ip_mask);
    store_be32(&out[8], rule.dst_ip);
    store_be32(&out[12], rule.dst_ip_mask);
    store_be16(&out[16], rule.src_port_min);
    store_be16(&out[18], rule.src_port_max);
    store_be16(&out[20], rule.dst_port_min);
    store_be16(&out[22], rule.dst_port_max);
    out[24] = rule.l4_proto;
    out[25] = rule.flags;
    return out;
}

/// Inverse of pack_rule. Rejects nonzero reserved bytes and inverted port
/// ranges.
inline firewall_rule unpack_rule(std::span<const std::uint8_t> bytes) {
    if (bytes.size() != rule_packed_bytes) {
        throw parse_error("packed rule must be exactly " + std::to_string(rule_packed_bytes) +
                          " bytes");
    }
    if (bytes[26] != 0 || bytes[27] != 0) {
        throw parse_error("reserved rule bytes must be zero");
    }
    firewall_rule rule;
    rule.src_ip = load_be32(&bytes[0]);
    rule.src_ip_mask = load_be32(&bytes[4]);
    rule.dst_ip = load_be32(&bytes[8]);
    rule.dst_ip_mask = load_be32(&bytes[12]);
    rule.src_port_min = load_be16(&bytes[16]);
    rule.src_port_max = load_be16(&bytes[18]);
    rule.dst_port_min = load_be16(&bytes[20]);
    rule.dst_port_max = load_be16(&bytes[22]);
    rule.l4_proto = bytes[24];
    rule.flags = bytes[25];
    if (rule.src_port_min > rule.src_port_max || rule.dst_port_min > rule.dst_port_max) {
        throw parse_error("packed rule has an inverted port range");
    }
    return rule;
}

inline constexpr std::string_view rule_file_magic = "FWR1";

namespace detail {

inline std::uint32_t mask_from_prefix(unsigned len) {
    return len == 0 ? 0 : static_cast<std::uint32_t>(0xFFFFFFFFULL << (32 - len));
}

// `allow src <ip>/<masklen> dst <ip>/<masklen> sport <min>-<max>
//  dport <min>-<max> proto <tcp|udp|icmp|any> [arp]`
inline firewall_rule parse_rule_line(std::string_view line, std::size_t line_no) {
    std::istringstream in{std::string(line)};
    std::string word;
    auto next = [&](const char* expected) {
        if (!(in >> word)) throw parse_error(std::string("expected ") + expected, line_no);
        return word;
    };
    auto expect = [&](const char* keyword) {
        if (next(keyword) != keyword) {
            throw parse_error("expected '" + std::string(keyword) + "', got '" + word + "'",
                              line_no);
        }
    };
    auto parse_cidr = [&](std::uint32_t& ip, std::uint32_t& mask) {
        std::string text = next("<ip>/<masklen>");
        auto slash = text.find('/');
        if (slash == std::string::npos) throw parse_error("expected <ip>/<masklen>", line_no);
        auto addr = parse_ipv4(std::string_view(text).substr(0, slash));
        if (!addr) throw parse_error("bad IPv4 address '" + text + "'", line_no);
        unsigned len = 0;
        try {
            std::size_t used = 0;
            len = static_cast<unsigned>(std::stoul(text.substr(slash + 1), &used));
            if (used != text.size() - slash - 1) throw std::invalid_argument("");
        } catch (const std::exception&) {
            throw parse_error("bad mask length in '" + text + "'", line_no);
        }
        if (len > 32) throw parse_error("mask length exceeds 32", line_no);
        ip = *addr;
        mask = mask_from_prefix(len);
    };
    auto parse_range = [&](std::uint16_t& lo, std::uint16_t& hi) {
        std::string text = next("<min>-<max>");
        auto dash = text.find('-');
        if (dash == std::string::npos) throw parse_error("expected <min>-<max>", line_no);
        try {
            std::size_t used = 0;
            unsigned long lo_v = std::stoul(text.substr(0, dash), &used);
            if (used != dash) throw std::invalid_argument("");
            unsigned long hi_v = std::stoul(text.substr(dash + 1), &used);
            if (used != text.size() - dash - 1) throw std::invalid_argument("");
            if (lo_v > 65535 || hi_v > 65535) throw std::out_of_range("");
            lo = static_cast<std::uint16_t>(lo_v);
            hi = static_cast<std::uint16_t>(hi_v);
        } catch (const std::exception&) {
            throw parse_error("bad port range '" + text + "'", line_no);
        }
        if (lo > hi) throw parse_error("port range '" + text + "' is inverted", line_no);
    };

    firewall_rule rule;
    expect("allow");
    expect("src");
    parse_cidr(rule.src_ip, rule.src_ip_mask);
    expect("dst");
    parse_cidr(rule.dst_ip, rule.dst_ip_mask);
    expect("sport");
    parse_range(rule.src_port_min, rule.src_port_max);
    expect("dport");
    parse_range(rule.dst_port_min, rule.dst_port_max);
    expect("proto");
    std::string proto = next("<tcp|udp|icmp|any>");
    if (proto == "tcp") rule.l4_proto = proto_tcp;
    else if (proto == "udp") rule.l4_proto = proto_udp;
    else if (proto == "icmp") rule.l4_proto = proto_icmp;
    else if (proto == "any") rule.l4_proto = firewall_rule::proto_any;
    else throw parse_error("unknown protocol '" + proto + "'", line_no);
    if (in >> word) {
        if (word != "arp") throw parse_error("unexpected trailing token '" + word + "'", line_no);
        rule.flags |= firewall_rule::flag_arp;
    }
    return rule;
}

}  // namespace detail

/// Loads a ruleset from file content, either the binary format ("FWR1",
/// count byte, count packed rules) or the one-rule-per-line text format
/// with '#' comments. At most 16 rules; the 17th is rejected.
inline rule_set load_ruleset(std::span<const std::uint8_t> content) {
    rule_set out;
    if (content.empty()) return out;  // empty whitelist blocks everything
    if (content.size() >= rule_file_magic.size() &&
        std::string_view(reinterpret_cast<const char*>(content.data()),
                         rule_file_magic.size()) == rule_file_magic) {
        if (content.size() < rule_file_magic.size() + 1) {
            throw parse_error("rule file ends before the rule count");
        }
        const std::size_t count = content[4];
        if (count > max_rules) {
            throw capacity_error("rule file declares " + std::to_string(count) +
                                 " rules; the memory holds at most " + std::to_string(max_rules));
        }
        if (content.size() != 5 + count * rule_packed_bytes) {
            throw parse_error("rule file size does not match its declared count");
        }
        for (std::size_t i = 0; i < count; ++i) {
            out.add(unpack_rule(content.subspan(5 + i * rule_packed_bytes, rule_packed_bytes)));
        }
        return out;
    }

    std::string_view text(reinterpret_cast<const char*>(content.data()), content.size());
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        auto eol = text.find('\n');
        std::string_view line = text.substr(0, eol);
        text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
        if (auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
        firewall_rule rule = detail::parse_rule_line(line, line_no);
        if (out.rules.size() >= max_rules) {
            throw capacity_error("line " + std::to_string(line_no) +
                                 ": rule memory holds at most " + std::to_string(max_rules) +
                                 " rules");
        }
        out.add(rule);
    }
    return out;
}

inline rule_set load_ruleset(std::string_view content) {
    return load_ruleset(std::span<const std::uint8_t>(
        reinterpret_cast<const std::uint8_t*>(content.data()), content.size()));
}

/// Human-readable one-line rendering, mirroring the text rule format where
/// the masks allow it.
inline std::string format_rule(const firewall_rule& rule) {
    auto cidr = [](std::uint32_t ip, std::uint32_t mask) {
        // prefix masks render as /len, arbitrary masks as &hex
        std::uint32_t inverted = ~mask;
        if ((inverted & (inverted + 1)) == 0) {
            return format_ipv4(ip) + "/" + std::to_string(std::popcount(mask));
        }
        char buf[16];
        std::snprintf(buf, sizeof(buf), "&%08x", mask);
        return format_ipv4(ip) + buf;
    };
    std::string proto = rule.l4_proto == proto_tcp    ? "tcp"
                        : rule.l4_proto == proto_udp  ? "udp"
                        : rule.l4_proto == proto_icmp ? "icmp"
                        : rule.l4_proto == firewall_rule::proto_any
                            ? "any"
                            : std::to_string(rule.l4_proto);
    std::string out = "allow src " + cidr(rule.src_ip, rule.src_ip_mask) + " dst " +
                      cidr(rule.dst_ip, rule.dst_ip_mask) + " sport " +
                      std::to_string(rule.src_port_min) + "-" +
                      std::to_string(rule.src_port_max) + " dport " +
                      std::to_string(rule.dst_port_min) + "-" +
                      std::to_string(rule.dst_port_max) + " proto " + proto;
    if (rule.matches_arp()) out += " arp";
    if (!rule.enabled()) out += " (disabled)";
    return out;
}

struct verdict {
    static constexpr std::uint8_t allowed_code = 3;
    static constexpr std::uint8_t blocked_code = 0;

    std::uint8_t code = blocked_code;
    std::optional<std::size_t> matched_rule_index;

    bool allowed() const { return code == allowed_code; }
};

namespace detail {

inline bool rule_matches(const firewall_rule& rule, const header_summary& s) {
    if (!rule.enabled()) return false;
    if (s.lev3_prot == ethertype_arp && !rule.matches_arp()) return false;
    if (rule.l4_proto != firewall_rule::proto_any) {
        if (!s.lev4_prot || *s.lev4_prot != rule.l4_proto) return false;
    }
    // Clauses over fields the frame does not carry are vacuously true.
    if (s.src_ip && (*s.src_ip & rule.src_ip_mask) != (rule.src_ip & rule.src_ip_mask)) {
        return false;
    }
    if (s.dst_ip && (*s.dst_ip & rule.dst_ip_mask) != (rule.dst_ip & rule.dst_ip_mask)) {
        return false;
    }
    if (s.src_port && (*s.src_port < rule.src_port_min || *s.src_port > rule.src_port_max)) {
        return false;
    }
    if (s.dst_port && (*s.dst_port < rule.dst_port_min || *s.dst_port > rule.dst_port_max)) {
        return false;
    }
    return true;
}

}  // namespace detail

/// Whitelist check: allowed (code 3) iff some enabled rule matches, with the
/// lowest matching index reported; blocked (code 0) otherwise.
inline verdict evaluate(const header_summary& summary, const rule_set& rules) {
    for (std::size_t i = 0; i < rules.rules.size(); ++i) {
        if (detail::rule_matches(rules.rules[i], summary)) {
            return {verdict::allowed_code, i};
        }
    }
    return {verdict::blocked_code, std::nullopt};
}

enum class packet_type : std::uint8_t { other = 0, tcp = 1, udp = 2, icmp = 3, arp = 4 };

inline packet_type classify_packet_type(const header_summary& summary) {
    if (summary.lev3_prot == ethertype_arp) return packet_type::arp;
    if (summary.lev4_prot) {
        switch (*summary.lev4_prot) {
            case proto_tcp: return packet_type::tcp;
            case proto_udp: return packet_type::udp;
            case proto_icmp: return packet_type::icmp;
            default: break;
        }
    }
    return packet_type::other;
}

}  // namespace sniffkit
