// rate_model.hpp - analytic data-rate model and sweep harness
//
// The steady-state data rate of looped frame traffic on a word-parallel bus
// is word_bits * N_FW / ((N_FW + N_MAC + N_DELAY) * T_CLK), clamped to the
// nominal line rate. Rates are kept as exact rationals internally so golden
// files carry no float drift, and rendered as decimals with six significant
// digits.

#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sniffkit/bus.hpp"
#include "sniffkit/errors.hpp"
#include "sniffkit/frame.hpp"
#include "sniffkit/generator.hpp"

namespace sniffkit {

namespace detail {

using uint128 = unsigned __int128;

inline std::uint64_t gcd_u128(uint128 a, std::uint64_t b) {
    std::uint64_t x = b;
    std::uint64_t y = static_cast<std::uint64_t>(a % b);
    while (y) {
        std::uint64_t t = x % y;
        x = y;
        y = t;
    }
    return x;
}

inline std::string u128_to_string(uint128 v) {
    if (v == 0) return "0";
    std::string out;
    while (v) {
        out.push_back(static_cast<char>('0' + static_cast<unsigned>(v % 10)));
        v /= 10;
    }
    std::reverse(out.begin(), out.end());
    return out;
}

}  // namespace detail

/// Bits per second as the exact rational num/den.
struct exact_rate {
    detail::uint128 num = 0;
    std::uint64_t den = 1;

    exact_rate() = default;
    exact_rate(detail::uint128 n, std::uint64_t d) : num(n), den(d) {
        if (den == 0) throw spec_error("rate denominator must be positive");
        std::uint64_t g = detail::gcd_u128(num, den);
        num /= g;
        den /= g;
    }

    double to_double() const {
        return static_cast<double>(static_cast<long double>(num) / static_cast<long double>(den));
    }

    bool operator==(const exact_rate& other) const {
        return num == other.num && den == other.den;  // both stored reduced
    }
    bool operator<(const exact_rate& other) const {
        return num * other.den < other.num * den;
    }
    bool operator<=(const exact_rate& other) const { return !(other < *this); }

    /// Decimal rendering with `significant` digits, printf %g style: fixed
    /// notation for exponents -4..significant-1, scientific otherwise,
    /// trailing zeros trimmed.
    std::string to_decimal(int significant = 6) const;
};

inline std::string exact_rate::to_decimal(int significant) const {
    if (num == 0) return "0";
    const int want = significant + 1;  // one guard digit for rounding

    std::string digits;
    int exp10 = 0;  // power of ten of the leading digit
    detail::uint128 q = num / den;
    std::uint64_t r = static_cast<std::uint64_t>(num % den);
    if (q > 0) {
        digits = detail::u128_to_string(q);
        exp10 = static_cast<int>(digits.size()) - 1;
    } else {
        // walk the fraction to the first significant digit
        exp10 = -1;
        detail::uint128 scaled = static_cast<detail::uint128>(r) * 10;
        while (scaled / den == 0) {
            scaled *= 10;
            --exp10;
        }
        digits.push_back(static_cast<char>('0' + static_cast<unsigned>(scaled / den)));
        r = static_cast<std::uint64_t>(scaled % den);
    }
    while (static_cast<int>(digits.size()) < want) {
        detail::uint128 scaled = static_cast<detail::uint128>(r) * 10;
        digits.push_back(static_cast<char>('0' + static_cast<unsigned>(scaled / den)));
        r = static_cast<std::uint64_t>(scaled % den);
    }

    // round half-up at the guard digit
    digits.resize(static_cast<std::size_t>(want));
    if (digits.back() >= '5') {
        digits.pop_back();
        int i = static_cast<int>(digits.size()) - 1;
        while (i >= 0 && digits[static_cast<std::size_t>(i)] == '9') {
            digits[static_cast<std::size_t>(i)] = '0';
            --i;
        }
        if (i < 0) {
            digits.insert(digits.begin(), '1');
            digits.pop_back();
            ++exp10;
        } else {
            ++digits[static_cast<std::size_t>(i)];
        }
    } else {
        digits.pop_back();
    }

    auto trim = [](std::string& s) {
        while (!s.empty() && s.back() == '0') s.pop_back();
    };

    if (exp10 < -4 || exp10 >= significant) {
        std::string mantissa = digits.substr(1);
        trim(mantissa);
        std::string out(1, digits[0]);
        if (!mantissa.empty()) out += "." + mantissa;
        out += exp10 < 0 ? "e-" : "e+";
        int e = exp10 < 0 ? -exp10 : exp10;
        if (e < 10) out.push_back('0');
        out += std::to_string(e);
        return out;
    }
    if (exp10 >= 0) {
        std::string ipart = digits.substr(0, static_cast<std::size_t>(exp10) + 1);
        std::string fpart = digits.substr(static_cast<std::size_t>(exp10) + 1);
        trim(fpart);
        return fpart.empty() ? ipart : ipart + "." + fpart;
    }
    std::string fpart(static_cast<std::size_t>(-exp10 - 1), '0');
    fpart += digits;
    trim(fpart);
    return "0." + fpart;
}

/// Analytic data rate in bits per second, before line-rate clamping.
inline exact_rate data_rate_unclamped(std::uint64_t n_fw, std::uint64_t n_mac,
                                      std::uint64_t n_delay, const bus_config& cfg) {
    cfg.validate();
    if (n_fw == 0) throw spec_error("n_fw: at least one bus word per frame");
    const detail::uint128 bits =
        static_cast<detail::uint128>(cfg.word_bytes) * 8 * n_fw * cfg.clock_hz;
    return {bits, n_fw + n_mac + n_delay};
}

/// Analytic data rate clamped to the nominal line rate; the physical MAC
/// inserts gaps whenever the raw word rate exceeds what the line carries.
inline exact_rate data_rate(std::uint64_t n_fw, std::uint64_t n_mac, std::uint64_t n_delay,
                            const bus_config& cfg) {
    exact_rate rate = data_rate_unclamped(n_fw, n_mac, n_delay, cfg);
    const exact_rate line{static_cast<detail::uint128>(cfg.line_rate_bps), 1};
    return line < rate ? line : rate;
}

struct rate_point {
    std::size_t frame_len = 0;  // requested length; words count the padded frame
    std::uint64_t n_fw = 0;
    std::uint64_t n_delay = 0;
    exact_rate dr;
};

/// Full cross product of frame lengths and inter-frame delays.
inline std::vector<rate_point> sweep(std::span<const std::size_t> frame_lens,
                                     std::span<const std::uint64_t> delays,
                                     const bus_config& cfg) {
    if (frame_lens.empty() || delays.empty()) {
        throw spec_error("sweep: length and delay lists must be non-empty");
    }
    std::vector<rate_point> out;
    out.reserve(frame_lens.size() * delays.size());
    for (std::size_t len : frame_lens) {
        const std::uint64_t n_fw = padded_word_count(len, cfg.word_bytes);
        for (std::uint64_t delay : delays) {
            out.push_back({len, n_fw, delay, data_rate(n_fw, cfg.n_mac, delay, cfg)});
        }
    }
    return out;
}

inline std::string sweep_csv(std::span<const rate_point> points) {
    std::string out = "frame_len,n_fw,n_delay,dr_bps\n";
    for (const rate_point& p : points) {
        out += std::to_string(p.frame_len) + ',' + std::to_string(p.n_fw) + ',' +
               std::to_string(p.n_delay) + ',' + p.dr.to_decimal() + '\n';
    }
    return out;
}

/// Gnuplot-ready series: one block per frame length, blank-line separated.
inline std::string sweep_series(std::span<const rate_point> points) {
    std::string out;
    std::size_t current = static_cast<std::size_t>(-1);
    for (const rate_point& p : points) {
        if (p.frame_len != current) {
            if (!out.empty()) out += "\n\n";
            out += "# frame_len " + std::to_string(p.frame_len) + "\n";
            current = p.frame_len;
        }
        out += std::to_string(p.n_delay) + ' ' + p.dr.to_decimal() + '\n';
    }
    return out;
}

/// Relative deviation between the simulated timeline throughput of a
/// schedule and the analytic closed form. The measured side steps the
/// generated beat stream (one beat per cycle plus the configured gaps);
/// both sides count word-granular bits and are clamped to line rate.
inline double compare_measured_vs_analytic(const gen_schedule& schedule) {
    if (schedule.frames.empty()) {
        throw spec_error("frames: comparison needs at least one frame");
    }
    const bus_config& cfg = schedule.cfg;
    const gen_run run = run_generator(schedule);
    if (run.frames_emitted == 0) {
        throw spec_error("mode: schedule emits no frames to measure");
    }

    const detail::uint128 word_bits = static_cast<detail::uint128>(cfg.word_bytes) * 8;
    const exact_rate line{static_cast<detail::uint128>(cfg.line_rate_bps), 1};

    exact_rate measured{word_bits * run.stream.beats.size() * cfg.clock_hz, run.total_cycles};
    if (line < measured) measured = line;

    detail::uint128 words = 0;
    for (const ethernet_frame& frame : schedule.frames) {
        words += frame_word_count(frame, cfg.word_bytes);
    }
    exact_rate analytic{words * word_bits * cfg.clock_hz,
                        timeline_cycles(schedule.frames, schedule.n_delay, cfg)};
    if (line < analytic) analytic = line;

    const detail::uint128 lhs = measured.num * analytic.den;
    const detail::uint128 rhs = analytic.num * measured.den;
    const detail::uint128 diff = lhs < rhs ? rhs - lhs : lhs - rhs;
    return static_cast<double>(static_cast<long double>(diff) /
                               static_cast<long double>(rhs));
}

// Sweep grids used by the CLI defaults: the classic length ladder and a
// delay ladder spanning zero to fifty thousand cycles.
inline constexpr std::array<std::size_t, 9> default_sweep_lengths_10g{
    50, 100, 200, 300, 400, 500, 750, 1000, 1500};
inline constexpr std::array<std::size_t, 9> default_sweep_lengths_100g{
    64, 100, 200, 300, 400, 500, 750, 1000, 1500};
inline constexpr std::array<std::uint64_t, 14> default_sweep_delays{
    0, 1, 2, 3, 4, 5, 10, 50, 100, 500, 1000, 5000, 10000, 50000};

}  // namespace sniffkit
