// stats.hpp - traffic statistics counters and report rendering

#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "sniffkit/errors.hpp"
#include "sniffkit/rules.hpp"

namespace sniffkit {

/// Monotone counters over verdicts and packet types. Invariants after any
/// update sequence: allowed + blocked == total_frames - errored_frames, and
/// the protocol buckets partition the analyzed frames the same way.
struct traffic_stats {
    std::uint64_t total_frames = 0;
    std::uint64_t allowed = 0;
    std::uint64_t blocked = 0;
    std::uint64_t tcp = 0;
    std::uint64_t udp = 0;
    std::uint64_t icmp = 0;
    std::uint64_t arp = 0;
    std::uint64_t other = 0;
    std::uint64_t errored_frames = 0;
    std::uint64_t l3_checksum_bad = 0;
    std::uint64_t l4_checksum_bad = 0;

    bool operator==(const traffic_stats&) const = default;

    void update(const verdict& v, packet_type type, check_status l3, check_status l4) {
        ++total_frames;
        v.allowed() ? ++allowed : ++blocked;
        switch (type) {
            case packet_type::tcp: ++tcp; break;
            case packet_type::udp: ++udp; break;
            case packet_type::icmp: ++icmp; break;
            case packet_type::arp: ++arp; break;
            case packet_type::other: ++other; break;
        }
        if (l3 == check_status::bad) ++l3_checksum_bad;
        if (l4 == check_status::bad) ++l4_checksum_bad;
    }

    /// Frames that never produced a summary (user flag, truncation).
    void record_error() {
        ++total_frames;
        ++errored_frames;
    }
};

/// Field-wise sum; commutative and associative with the all-zero identity.
/// Throws counter_overflow_error instead of wrapping.
inline traffic_stats merge(const traffic_stats& a, const traffic_stats& b) {
    auto checked = [](std::uint64_t x, std::uint64_t y) {
        std::uint64_t sum = x + y;
        if (sum < x) throw counter_overflow_error("statistics counter overflow");
        return sum;
    };
    traffic_stats out;
    out.total_frames = checked(a.total_frames, b.total_frames);
    out.allowed = checked(a.allowed, b.allowed);
    out.blocked = checked(a.blocked, b.blocked);
    out.tcp = checked(a.tcp, b.tcp);
    out.udp = checked(a.udp, b.udp);
    out.icmp = checked(a.icmp, b.icmp);
    out.arp = checked(a.arp, b.arp);
    out.other = checked(a.other, b.other);
    out.errored_frames = checked(a.errored_frames, b.errored_frames);
    out.l3_checksum_bad = checked(a.l3_checksum_bad, b.l3_checksum_bad);
    out.l4_checksum_bad = checked(a.l4_checksum_bad, b.l4_checksum_bad);
    return out;
}

enum class report_format { text, csv, json };

inline constexpr const char* report_fields[] = {
    "total_frames", "allowed", "blocked", "tcp", "udp", "icmp", "arp", "other",
    "errored_frames", "l3_checksum_bad", "l4_checksum_bad"};

namespace detail {

inline std::uint64_t report_value(const traffic_stats& s, std::size_t field) {
    const std::uint64_t values[] = {s.total_frames, s.allowed, s.blocked, s.tcp,
                                    s.udp, s.icmp, s.arp, s.other,
                                    s.errored_frames, s.l3_checksum_bad, s.l4_checksum_bad};
    return values[field];
}

}  // namespace detail

/// Deterministic report with stable key names in all three formats.
inline std::string render_report(const traffic_stats& stats, report_format format) {
    constexpr std::size_t n = std::size(report_fields);
    switch (format) {
        case report_format::text: {
            std::string out;
            for (std::size_t i = 0; i < n; ++i) {
                std::string name = report_fields[i];
                out += name + std::string(17 - name.size(), ' ') +
                       std::to_string(detail::report_value(stats, i)) + '\n';
            }
            return out;
        }
        case report_format::csv: {
            std::string head, row;
            for (std::size_t i = 0; i < n; ++i) {
                if (i) {
                    head.push_back(',');
                    row.push_back(',');
                }
                head += report_fields[i];
                row += std::to_string(detail::report_value(stats, i));
            }
            return head + '\n' + row + '\n';
        }
        case report_format::json: {
            nlohmann::ordered_json doc;
            for (std::size_t i = 0; i < n; ++i) {
                doc[report_fields[i]] = detail::report_value(stats, i);
            }
            return doc.dump() + '\n';
        }
    }
    return {};
}

}  // namespace sniffkit
