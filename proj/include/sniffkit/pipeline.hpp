// pipeline.hpp - offline sniffer pipeline
//
// read -> analyze -> rules check -> statistics, with one alert per blocked
// frame. This is the engine behind the `sniff` command and the end-to-end
// tests.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sniffkit/alert.hpp"
#include "sniffkit/analyzer.hpp"
#include "sniffkit/errors.hpp"
#include "sniffkit/frame.hpp"
#include "sniffkit/pcap.hpp"
#include "sniffkit/rules.hpp"
#include "sniffkit/stats.hpp"

namespace sniffkit {

struct sniff_outcome {
    traffic_stats stats;
    std::vector<alert_record> alerts;
    std::size_t sink_warnings = 0;  // alerts that failed to deliver
};

/// Runs the sniffer over capture records. Truncated or unparseable records
/// count as errored frames; every blocked frame produces exactly one alert.
/// Timestamps in alerts are relative to the first record.
inline sniff_outcome run_sniffer(std::span<const pcap_record> records, const rule_set& rules,
                                 alert_sink* sink = nullptr) {
    sniff_outcome out;
    const std::uint64_t first_ts = records.empty() ? 0 : records.front().ts_micros;
    for (const pcap_record& record : records) {
        if (record.truncated() || record.bytes.size() < eth_header_len) {
            out.stats.record_error();
            continue;
        }
        header_summary summary;
        try {
            summary = analyze(ethernet_frame{record.bytes});
        } catch (const malformed_frame_error&) {
            out.stats.record_error();
            continue;
        }
        const verdict v = evaluate(summary, rules);
        out.stats.update(v, classify_packet_type(summary), summary.l3_checksum,
                         summary.l4_checksum);
        if (!v.allowed()) {
            alert_record alert;
            // signed: capture timestamps are not guaranteed monotone
            alert.timestamp = static_cast<double>(static_cast<std::int64_t>(
                                  record.ts_micros - first_ts)) /
                              1e6;
            alert.summary = summary;
            alert.verdict_code = v.code;
            alert.reason = "no-match";
            if (sink && !emit_alert(alert, *sink)) ++out.sink_warnings;
            out.alerts.push_back(std::move(alert));
        }
    }
    return out;
}

}  // namespace sniffkit
