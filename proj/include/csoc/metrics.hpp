#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "csoc/game.hpp"

namespace csoc {

enum class Band { Green = 0, Yellow = 1, Orange = 2, Red = 3 };

inline const char* band_name(Band b) {
    switch (b) {
        case Band::Green: return "green";
        case Band::Yellow: return "yellow";
        case Band::Orange: return "orange";
        case Band::Red: return "red";
    }
    return "?";
}

// Linear backlog <-> wait-time map: the low anchor is one hour, the high
// anchor four hours, extrapolated above and rounded up to 1h below.
struct BandBoundaries {
    long long anchor_low = 1175;  // 1 hour
    long long anchor_high = 4350; // 4 hours

    static BandBoundaries from_config(const GameConfig& cfg) {
        return BandBoundaries{cfg.cost_anchor_low, cfg.cost_anchor_high};
    }

    double backlog_at_hours(double hours) const {
        return static_cast<double>(anchor_low) +
               static_cast<double>(anchor_high - anchor_low) * (hours - 1.0) / 3.0;
    }
};

inline double backlog_to_avgtta(long long backlog, const BandBoundaries& bb = {}) {
    if (backlog < 0) throw std::invalid_argument("backlog_to_avgtta: negative backlog");
    const double scaled = 1.0 + 3.0 *
                                    (static_cast<double>(backlog - bb.anchor_low)) /
                                    static_cast<double>(bb.anchor_high - bb.anchor_low);
    return std::max(1.0, scaled);
}

// Exact boundaries (2h, 3h, 4h) belong to the worse band.
inline Band color_band(double hours) {
    if (hours < 1.0) throw std::invalid_argument("color_band: hours must be >= 1");
    if (hours < 2.0) return Band::Green;
    if (hours < 3.0) return Band::Yellow;
    if (hours < 4.0) return Band::Orange;
    return Band::Red;
}

inline Band backlog_band(long long backlog, const BandBoundaries& bb = {}) {
    return color_band(backlog_to_avgtta(backlog, bb));
}

// Fraction of all hours (across every run) spent in each band. Classifies the
// end-of-hour backlog by default; classify_post_allocation switches to the
// after-allocation snapshot instead.
inline std::array<double, 4> band_proportions(const std::vector<RunTrace>& traces,
                                              const BandBoundaries& bb = {},
                                              bool classify_post_allocation = false) {
    if (traces.empty()) throw std::invalid_argument("band_proportions: empty run set");
    std::array<long long, 4> counts{0, 0, 0, 0};
    long long total = 0;
    for (const auto& trace : traces) {
        for (const auto& h : trace.hours) {
            const long long b = classify_post_allocation ? h.post_allocation_backlog
                                                         : h.backlog_post;
            counts[static_cast<std::size_t>(backlog_band(b, bb))]++;
            ++total;
        }
    }
    std::array<double, 4> proportions{};
    for (std::size_t i = 0; i < 4; ++i)
        proportions[i] = static_cast<double>(counts[i]) / static_cast<double>(total);
    return proportions;
}

// Run with the maximum backlog ever seen; ties go to the lowest index.
inline std::size_t worst_run(const std::vector<RunTrace>& traces) {
    if (traces.empty()) throw std::invalid_argument("worst_run: empty run set");
    std::size_t best = 0;
    long long best_backlog = traces[0].max_backlog;
    for (std::size_t i = 1; i < traces.size(); ++i) {
        if (traces[i].max_backlog > best_backlog) {
            best = i;
            best_backlog = traces[i].max_backlog;
        }
    }
    return best;
}

struct RunSetStats {
    std::array<double, 4> proportions{};
    std::size_t worst_run_index = 0;
    std::vector<long long> per_run_max_backlog;

    static RunSetStats from_traces(const std::vector<RunTrace>& traces,
                                   const BandBoundaries& bb = {}) {
        RunSetStats stats;
        stats.proportions = band_proportions(traces, bb);
        stats.worst_run_index = worst_run(traces);
        stats.per_run_max_backlog.reserve(traces.size());
        for (const auto& t : traces) stats.per_run_max_backlog.push_back(t.max_backlog);
        return stats;
    }
};

} // namespace csoc
