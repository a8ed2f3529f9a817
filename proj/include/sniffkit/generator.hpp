// generator.hpp - deterministic packet generator
//
// Compiles a frame list plus a programmable inter-frame delay into a timed
// beat stream. Single-loop mode emits the list once; continuous mode
// repeats it a fixed number of times so runs stay reproducible.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sniffkit/bus.hpp"
#include "sniffkit/errors.hpp"
#include "sniffkit/frame.hpp"

namespace sniffkit {

enum class gen_mode { single_loop, continuous, stopped };

inline constexpr std::size_t default_gen_capacity_bytes = 16u << 20;

struct gen_schedule {
    std::vector<ethernet_frame> frames;
    std::uint64_t n_delay = 0;
    gen_mode mode = gen_mode::single_loop;
    std::uint64_t loop_count = 1;  // continuous mode repetitions
    bus_config cfg{};
};

/// Validates frames against the generator memory model and freezes the run
/// parameters. Frame order is preserved.
inline gen_schedule compile_schedule(std::vector<ethernet_frame> frames, std::uint64_t n_delay,
                                     gen_mode mode, const bus_config& cfg,
                                     std::uint64_t loop_count = 1,
                                     std::size_t capacity_bytes = default_gen_capacity_bytes) {
    cfg.validate();
    if (mode != gen_mode::stopped && frames.empty()) {
        throw spec_error("frames: schedule needs at least one frame");
    }
    std::size_t bytes = 0;
    for (const ethernet_frame& frame : frames) {
        if (frame.declared_len() > max_frame_len) {
            throw spec_error("frames: frame of " + std::to_string(frame.declared_len()) +
                             " bytes exceeds " + std::to_string(max_frame_len));
        }
        bytes += frame.declared_len();
        if (bytes > capacity_bytes) {
            throw capacity_error("frames: schedule exceeds generator memory of " +
                                 std::to_string(capacity_bytes) + " bytes");
        }
    }
    return {std::move(frames), n_delay, mode, loop_count, cfg};
}

/// One generator run: the emitted stream, the cycle index at which each
/// frame's first beat left, and the total cycle count including the
/// inter-frame gap after the last frame (the steady-state loop cost).
struct gen_run {
    beat_stream stream;
    std::vector<std::uint64_t> emission_cycles;
    std::uint64_t total_cycles = 0;
    std::uint64_t frames_emitted = 0;
};

inline gen_run run_generator(const gen_schedule& schedule) {
    gen_run run;
    if (schedule.mode == gen_mode::stopped) return run;

    const std::uint64_t loops =
        schedule.mode == gen_mode::continuous ? schedule.loop_count : 1;
    const std::uint64_t gap = schedule.cfg.n_mac + schedule.n_delay;
    std::uint64_t cycle = 0;
    for (std::uint64_t loop = 0; loop < loops; ++loop) {
        for (const ethernet_frame& frame : schedule.frames) {
            if (run.frames_emitted > 0) cycle += gap;
            run.stream.gaps.push_back(run.frames_emitted > 0 ? gap : 0);
            run.emission_cycles.push_back(cycle);
            std::vector<bus_beat> beats = serialize_frame(frame, schedule.cfg);
            cycle += beats.size();
            run.stream.beats.insert(run.stream.beats.end(), beats.begin(), beats.end());
            ++run.frames_emitted;
        }
    }
    // trailing gap: the cost every frame pays in loop traffic
    run.total_cycles = run.frames_emitted > 0 ? cycle + gap : 0;
    return run;
}

/// N frames identical to the template except for src_port = 0..N-1, each
/// with freshly computed checksums.
inline std::vector<ethernet_frame> sweep_source_ports(const frame_spec& tmpl,
                                                      std::size_t count) {
    if (!tmpl.l4_protocol ||
        (*tmpl.l4_protocol != proto_tcp && *tmpl.l4_protocol != proto_udp)) {
        throw spec_error("l4_protocol: source-port sweep needs a TCP or UDP template");
    }
    if (count > 65536) {
        throw spec_error("port_range: source ports are 16-bit, at most 65536 values");
    }
    std::vector<ethernet_frame> out;
    out.reserve(count);
    frame_spec spec = tmpl;
    for (std::size_t port = 0; port < count; ++port) {
        spec.src_port = static_cast<std::uint16_t>(port);
        out.push_back(build_frame(spec));
    }
    return out;
}

}  // namespace sniffkit
