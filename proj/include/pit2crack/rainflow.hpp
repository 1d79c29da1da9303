#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

#include "pit2crack/errors.hpp"

namespace p2c {

/// One counted cycle of a scalar series. i_start/i_end are indices into the
/// ORIGINAL series (the turning points bounding the cycle), so callers can
/// evaluate companion quantities over the same sample window.
struct RainflowCycle {
    double range = 0.0;
    double mean = 0.0;
    double weight = 1.0; // 1.0 full cycle, 0.5 residue half cycle
    std::size_t i_start = 0;
    std::size_t i_end = 0;
};

namespace detail {

struct TurningPoint {
    double value;
    std::size_t index;
};

/// Compresses a series to its strict turning points (first and last samples
/// always kept; equal-value runs collapse to their first sample).
inline std::vector<TurningPoint> peak_valley_filter(std::span<const double> series) {
    std::vector<TurningPoint> tp;
    if (series.empty()) return tp;
    tp.push_back({series[0], 0});
    int dir = 0; // -1 falling, +1 rising
    for (std::size_t k = 1; k < series.size(); ++k) {
        const double v = series[k];
        if (v == tp.back().value) continue;
        const int d = v > tp.back().value ? 1 : -1;
        if (d == dir)
            tp.back() = {v, k}; // extend the current monotone run
        else {
            tp.push_back({v, k});
            dir = d;
        }
    }
    return tp;
}

} // namespace detail

/// Four-point rainflow counting. The turning-point stack is scanned as it
/// grows: whenever the inner range of the last four points is <= both
/// adjacent ranges, the inner pair is counted as a full cycle and removed
/// (extraction preserves strict alternation of the stack, so no degenerate
/// pairs arise). Whatever remains afterwards is the residue, counted as
/// half cycles -- the conservative choice under a linear damage sum.
///
/// A constant series yields no cycles.
inline std::vector<RainflowCycle> rainflow(std::span<const double> series) {
    if (series.size() < 2) throw DomainError("rainflow: series needs at least 2 points");
    const auto tp = detail::peak_valley_filter(series);

    std::vector<RainflowCycle> cycles;
    std::vector<detail::TurningPoint> stack;
    stack.reserve(tp.size());
    for (const auto& p : tp) {
        stack.push_back(p);
        while (stack.size() >= 4) {
            const auto& a = stack[stack.size() - 4];
            const auto& b = stack[stack.size() - 3];
            const auto& c = stack[stack.size() - 2];
            const auto& d = stack[stack.size() - 1];
            const double r1 = std::abs(a.value - b.value);
            const double r2 = std::abs(b.value - c.value);
            const double r3 = std::abs(c.value - d.value);
            if (!(r2 <= r1 && r2 <= r3)) break;
            cycles.push_back({r2, 0.5 * (b.value + c.value), 1.0, b.index, c.index});
            stack[stack.size() - 3] = d; // drop b, c; keep a, d adjacent
            stack.pop_back();
            stack.pop_back();
        }
    }
    for (std::size_t k = 0; k + 1 < stack.size(); ++k)
        cycles.push_back({std::abs(stack[k].value - stack[k + 1].value),
                          0.5 * (stack[k].value + stack[k + 1].value), 0.5, stack[k].index,
                          stack[k + 1].index});
    return cycles;
}

struct CompanionStats {
    double range = 0.0;
    double mean = 0.0;
};

/// Range and mean of a companion series over the inclusive sample window
/// [i_start, i_end] of a counted cycle.
inline CompanionStats companion_stats(std::span<const double> companion, std::size_t i_start,
                                      std::size_t i_end) {
    if (i_end >= companion.size() || i_start > i_end)
        throw DomainError("companion_stats: window out of range");
    double lo = companion[i_start], hi = companion[i_start], sum = 0.0;
    for (std::size_t k = i_start; k <= i_end; ++k) {
        lo = std::min(lo, companion[k]);
        hi = std::max(hi, companion[k]);
        sum += companion[k];
    }
    return {hi - lo, sum / static_cast<double>(i_end - i_start + 1)};
}

struct RainflowCycleWithCompanion {
    RainflowCycle cycle;
    double companion_range = 0.0;
    double companion_mean = 0.0;
};

inline std::vector<RainflowCycleWithCompanion> rainflow(std::span<const double> series,
                                                        std::span<const double> companion) {
    if (companion.size() != series.size())
        throw DomainError("rainflow: companion series length must match");
    std::vector<RainflowCycleWithCompanion> out;
    for (const auto& c : rainflow(series)) {
        const auto cs = companion_stats(companion, c.i_start, c.i_end);
        out.push_back({c, cs.range, cs.mean});
    }
    return out;
}

} // namespace p2c
