// sniffkit - offline packet sniffer, generator and rate-model CLI
//
// Subcommands:
//   sniff        run the whitelist sniffer over a pcap file
//   generate     build frames from a config file into a pcap file
//   sweep        evaluate the data-rate model over the standard grid
//   rules-check  validate a rule file and echo the packed rules
//
// Exit codes: 0 success, 1 usage, 2 input error, 3 internal error.

#include <atomic>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sniffkit/sniffkit.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_usage = 1;
constexpr int exit_input = 2;
constexpr int exit_internal = 3;

std::atomic<bool> g_stop{false};

void handle_interrupt(int) { g_stop.store(true); }

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw sniffkit::io_error("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string read_file_text(const std::filesystem::path& path) {
    auto bytes = read_file_bytes(path);
    return {bytes.begin(), bytes.end()};
}

void write_file(const std::filesystem::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw sniffkit::io_error("cannot open " + path.string() + " for writing");
    out << content;
    if (!out) throw sniffkit::io_error("write failed on " + path.string());
}

int cmd_sniff(const std::string& in, const std::string& rules_path,
              const std::string& report_path, const std::string& alerts_spec,
              const std::string& format_name) {
    sniffkit::report_format format;
    if (format_name == "text") format = sniffkit::report_format::text;
    else if (format_name == "csv") format = sniffkit::report_format::csv;
    else if (format_name == "json") format = sniffkit::report_format::json;
    else throw sniffkit::parse_error("format must be text, csv or json");

    const auto records = sniffkit::read_pcap(in);
    const auto rules = sniffkit::load_ruleset(std::span<const std::uint8_t>(
        read_file_bytes(rules_path)));

    std::unique_ptr<sniffkit::alert_sink> sink;
    if (!alerts_spec.empty()) sink = sniffkit::make_alert_sink(alerts_spec);

    const auto outcome = sniffkit::run_sniffer(records, rules, sink.get());
    write_file(report_path, sniffkit::render_report(outcome.stats, format));
    if (outcome.sink_warnings) {
        std::cerr << "warning: " << outcome.sink_warnings << " alert(s) failed to deliver\n";
    }
    std::cout << "processed " << outcome.stats.total_frames << " frames, allowed "
              << outcome.stats.allowed << ", blocked " << outcome.stats.blocked
              << ", errored " << outcome.stats.errored_frames << "\n";
    return exit_ok;
}

int cmd_generate(const std::string& config_path, const std::string& out_path) {
    const sniffkit::gen_config config =
        sniffkit::parse_gen_config(read_file_text(config_path));
    std::vector<sniffkit::ethernet_frame> frames;
    if (config.pcap_source) {
        std::size_t skipped = 0;
        for (auto& record : sniffkit::read_pcap(*config.pcap_source)) {
            if (record.truncated() || record.bytes.size() < sniffkit::eth_header_len) {
                ++skipped;
                continue;
            }
            frames.push_back(sniffkit::ethernet_frame{std::move(record.bytes)});
        }
        if (skipped) {
            std::cerr << "warning: skipped " << skipped
                      << " truncated or short record(s) from " << *config.pcap_source << "\n";
        }
    } else {
        frames = sniffkit::build_config_frames(config);
    }
    if (frames.empty()) throw sniffkit::spec_error("config produced no frames");
    const sniffkit::gen_schedule schedule =
        sniffkit::compile_schedule(std::move(frames), config.n_delay, config.mode, config.bus,
                                   config.loops.value_or(1));

    const std::uint64_t gap = config.bus.n_mac + config.n_delay;
    std::uint64_t loops = 1;
    bool unbounded = false;
    if (config.mode == sniffkit::gen_mode::continuous) {
        if (config.loops) {
            loops = *config.loops;
        } else {
            unbounded = true;  // run until interrupted
            std::signal(SIGINT, handle_interrupt);
            std::signal(SIGTERM, handle_interrupt);
        }
    } else if (config.mode == sniffkit::gen_mode::stopped) {
        loops = 0;
    }

    sniffkit::pcap_writer writer(out_path);
    unsigned __int128 cycle = 0;
    std::uint64_t written = 0;
    for (std::uint64_t i = 0; (unbounded || i < loops) && !g_stop.load(); ++i) {
        for (const sniffkit::ethernet_frame& frame : schedule.frames) {
            if (g_stop.load()) break;  // stop requests honored at frame boundaries
            const std::uint64_t ts_micros =
                static_cast<std::uint64_t>(cycle * 1'000'000 / config.bus.clock_hz);
            writer.write(ts_micros, frame.bytes);
            cycle += sniffkit::frame_word_count(frame, config.bus.word_bytes) + gap;
            ++written;
        }
    }
    writer.close();
    std::cout << "wrote " << written << " frames to " << out_path << "\n";
    return exit_ok;
}

int cmd_sweep(const std::string& bus_name, const std::string& out_path,
              const std::string& series_path) {
    sniffkit::bus_config cfg;
    std::span<const std::size_t> lengths;
    if (bus_name == "10g") {
        cfg = sniffkit::bus_config::rate_10g();
        lengths = sniffkit::default_sweep_lengths_10g;
    } else if (bus_name == "100g") {
        cfg = sniffkit::bus_config::rate_100g();
        lengths = sniffkit::default_sweep_lengths_100g;
    } else {
        throw sniffkit::parse_error("bus must be 10g or 100g");
    }
    const auto points = sniffkit::sweep(lengths, sniffkit::default_sweep_delays, cfg);
    write_file(out_path, sniffkit::sweep_csv(points));
    if (!series_path.empty()) write_file(series_path, sniffkit::sweep_series(points));
    std::cout << "wrote " << points.size() << " rate points to " << out_path << "\n";
    return exit_ok;
}

int cmd_rules_check(const std::string& rules_path) {
    const auto rules = sniffkit::load_ruleset(std::span<const std::uint8_t>(
        read_file_bytes(rules_path)));
    std::cout << rules.rules.size() << " rule(s) valid\n";
    for (std::size_t i = 0; i < rules.rules.size(); ++i) {
        const auto packed = sniffkit::pack_rule(rules.rules[i]);
        std::cout << "  [" << i << "] " << sniffkit::to_hex(packed) << "  "
                  << sniffkit::format_rule(rules.rules[i]) << "\n";
    }
    return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"offline packet sniffer, packet generator and data-rate model"};
    app.require_subcommand(1);

    std::string in_path, rules_path, report_path, alerts_spec, format_name = "text";
    auto* sniff = app.add_subcommand("sniff", "run the whitelist sniffer over a pcap file");
    sniff->add_option("--in", in_path, "input pcap file")->required();
    sniff->add_option("--rules", rules_path, "rule file (text or FWR1 binary)")->required();
    sniff->add_option("--report", report_path, "report output path")->required();
    sniff->add_option("--alerts", alerts_spec, "alert sink: file path or udp:host:port");
    sniff->add_option("--format", format_name, "report format: text|csv|json")
        ->check(CLI::IsMember({"text", "csv", "json"}));

    std::string config_path, pcap_out;
    auto* generate = app.add_subcommand("generate", "build frames from a config into a pcap");
    generate->add_option("--config", config_path, "generator config (JSON)")->required();
    generate->add_option("--out", pcap_out, "output pcap file")->required();

    std::string bus_name = "10g", sweep_out, series_path;
    auto* sweep = app.add_subcommand("sweep", "evaluate the data-rate model grid");
    sweep->add_option("--bus", bus_name, "bus flavor: 10g|100g")
        ->check(CLI::IsMember({"10g", "100g"}));
    sweep->add_option("--out", sweep_out, "CSV output path")->required();
    sweep->add_option("--series", series_path, "gnuplot series output path");

    std::string check_path;
    auto* rules_check = app.add_subcommand("rules-check", "validate and echo a rule file");
    rules_check->add_option("file", check_path, "rule file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        if (sniff->parsed()) {
            return cmd_sniff(in_path, rules_path, report_path, alerts_spec, format_name);
        }
        if (generate->parsed()) return cmd_generate(config_path, pcap_out);
        if (sweep->parsed()) return cmd_sweep(bus_name, sweep_out, series_path);
        if (rules_check->parsed()) return cmd_rules_check(check_path);
        return exit_usage;
    } catch (const sniffkit::error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_input;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return exit_internal;
    }
}
