#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "csoc/game.hpp"
#include "csoc/policies.hpp"
#include "csoc/queue.hpp"
#include "csoc/rng.hpp"

namespace csoc {

struct BoundInputs {
    long long threshold = 2233;  // B
    int horizon_hours = 336;     // N
    double mu = 1920.0;
    CostFunction cost;
    long long defender_budget = 28800; // X
    long long attacker_budget = 28800; // Y
};

// Closed-form guarantee for the threshold rule when the attacker has no
// budget advantage: (1 + f(B)) * (1 - 1/B)^(N*mu/B) - 1.
inline double theorem1_lower_bound(const BoundInputs& in) {
    if (in.threshold <= 1)
        throw std::invalid_argument("theorem1_lower_bound: threshold must be > 1");
    if (in.attacker_budget > in.defender_budget)
        throw std::invalid_argument(
            "theorem1_lower_bound: requires attacker budget <= defender budget");
    if (!(in.mu > 0.0) || in.horizon_hours < 1)
        throw std::invalid_argument("theorem1_lower_bound: invalid horizon or mu");
    const double b = static_cast<double>(in.threshold);
    const double exponent = static_cast<double>(in.horizon_hours) * in.mu / b;
    const double cycle_factor = std::pow(1.0 - 1.0 / b, exponent);
    return (1.0 + in.cost(b)) * cycle_factor - 1.0;
}

// Chernoff-style lower-tail bound for a Poisson sum over `hours` hours:
// P(S <= hours*lambda - fraction*lambda) <= exp(-fraction^2 * lambda / (2*hours)).
inline double poisson_lower_tail_bound(double lambda, int hours, double fraction) {
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        throw std::invalid_argument("poisson_lower_tail_bound: lambda must be positive");
    if (!(fraction >= 0.0) || fraction >= static_cast<double>(hours))
        throw std::invalid_argument("poisson_lower_tail_bound: need 0 <= fraction < hours");
    return std::exp(-(fraction * fraction * lambda) / (2.0 * static_cast<double>(hours)));
}

namespace detail {
// The reference arithmetic for this attack quotes values cut to three
// decimals; reproduce that rounding so the chain matches digit for digit.
inline double trunc3(double v) { return std::floor(v * 1000.0) / 1000.0; }
} // namespace detail

struct DumpAttackReport {
    int dump_hours = 0;             // hours of max-rate dumping
    long long total_sent = 0;       // attacker budget actually dumped
    long long arrivals_floor = 0;   // high-probability floor on natural arrivals
    long long normal_service = 0;   // nominal capacity over the dump window
    long long absorbed = 0;         // extra alerts absorbed by normal service
    long long guaranteed_backlog = 0; // residual after full defender spend
    bool has_guarantee = false;
    double tail_bound = 0.0;        // exact concentration tail
    double cost_at_residual = 0.0;  // exact f(residual)
    double confidence = 0.0;        // 1 - tail, after the quoted rounding
    double utility_bound = 0.0;     // -trunc3(f) * confidence, quoted rounding
    double utility_bound_exact = 0.0;
};

// Arithmetic of the budget-advantage dump attack: the attacker dumps the cap
// every hour; concentration says natural arrivals almost fill the normal
// service capacity, so nearly all extra alerts survive even a full defender
// spend.
inline DumpAttackReport dump_attack_analysis(const GameConfig& cfg, double fraction = 0.3) {
    cfg.validate();
    if (cfg.attacker_budget - cfg.defender_budget < 2 * cfg.per_hour_cap)
        throw std::invalid_argument(
            "dump_attack_analysis: requires attacker budget advantage of at least twice "
            "the hourly cap");
    if (cfg.per_hour_cap <= 0)
        throw std::invalid_argument("dump_attack_analysis: requires a positive hourly cap");

    DumpAttackReport r;
    r.dump_hours = static_cast<int>((cfg.attacker_budget + cfg.per_hour_cap - 1) /
                                    cfg.per_hour_cap);
    r.total_sent = cfg.attacker_budget;
    const double lambda = cfg.queue.lambda_nominal;
    r.arrivals_floor = static_cast<long long>(
        std::floor((static_cast<double>(r.dump_hours) - fraction) * lambda));
    r.normal_service =
        r.dump_hours * std::llround(cfg.queue.mu_nominal);
    r.absorbed = std::max(0LL, r.normal_service - r.arrivals_floor);
    r.guaranteed_backlog =
        std::max(0LL, r.total_sent - cfg.defender_budget - r.absorbed);
    r.has_guarantee = r.guaranteed_backlog > 0;

    r.tail_bound = poisson_lower_tail_bound(lambda, r.dump_hours, fraction);
    r.cost_at_residual = cfg.cost()(static_cast<double>(r.guaranteed_backlog));
    r.confidence = 1.0 - detail::trunc3(r.tail_bound);
    r.utility_bound = -detail::trunc3(detail::trunc3(r.cost_at_residual) * r.confidence);
    r.utility_bound_exact = -r.cost_at_residual * (1.0 - r.tail_bound);
    return r;
}

// The quoted closed-form example for the threshold rule does not match a
// direct evaluation of the formula; surface both instead of hiding it.
struct Theorem1ExampleReport {
    long long threshold = 1500;
    double formula_value = 0.0;
    double quoted_value = -0.3;
    bool matches_quote = false;
};

inline Theorem1ExampleReport theorem1_example_report() {
    Theorem1ExampleReport r;
    BoundInputs in;
    in.threshold = r.threshold;
    in.horizon_hours = 336;
    in.mu = 1920.0;
    r.formula_value = theorem1_lower_bound(in);
    r.matches_quote = std::abs(r.formula_value - r.quoted_value) < 0.05;
    return r;
}

// ---------------------------------------------------------------------------
// Busy cycles
// ---------------------------------------------------------------------------

// A busy cycle is a zero-to-zero segment of the hourly backlog series.
// Consecutive zero hours produce empty segments, i.e. zero-length cycles;
// those count toward the cycle total with max 0.
struct BusyCycleStats {
    long long closed_cycles = 0;             // includes zero-length ones
    std::vector<long long> positive_maxima;  // per positive-length closed cycle
    bool has_open_cycle = false;             // trace ended (or started) mid-cycle
    long long open_cycle_max = 0;

    // P(cycle max >= j) over closed cycles.
    double tail(long long j) const {
        if (closed_cycles == 0) return 0.0;
        long long count = 0;
        for (long long m : positive_maxima)
            if (m >= j) ++count;
        return static_cast<double>(count) / static_cast<double>(closed_cycles);
    }
};

inline BusyCycleStats busy_cycle_stats(std::span<const long long> hourly_backlog) {
    BusyCycleStats stats;
    bool seen_zero = false;
    long long current_max = 0;
    bool in_cycle = false;

    for (long long b : hourly_backlog) {
        if (b < 0) throw std::invalid_argument("busy_cycle_stats: negative backlog");
        if (b == 0) {
            if (seen_zero) {
                // close the segment since the previous zero
                ++stats.closed_cycles;
                if (in_cycle) stats.positive_maxima.push_back(current_max);
            }
            seen_zero = true;
            in_cycle = false;
            current_max = 0;
        } else if (seen_zero) {
            in_cycle = true;
            current_max = std::max(current_max, b);
        } else {
            // leading partial cycle with no known start
            stats.has_open_cycle = true;
            stats.open_cycle_max = std::max(stats.open_cycle_max, b);
        }
    }
    if (in_cycle) {
        stats.has_open_cycle = true;
        stats.open_cycle_max = std::max(stats.open_cycle_max, current_max);
    }
    if (!seen_zero) stats.has_open_cycle = true;
    return stats;
}

inline BusyCycleStats busy_cycle_stats(const std::vector<HourOutcome>& trace,
                                       long long initial_backlog) {
    std::vector<long long> series;
    series.reserve(trace.size() + 1);
    series.push_back(initial_backlog);
    for (const auto& h : trace) series.push_back(h.backlog_after);
    return busy_cycle_stats(std::span<const long long>(series));
}

// ---------------------------------------------------------------------------
// Paired spend-dominance check for the threshold rule
// ---------------------------------------------------------------------------

struct PairedViolation {
    int run = 0;
    std::size_t schedule = 0;
    int hour = 0; // 0 means the end-of-run spend check
    std::string what;
};

struct PairedCheckReport {
    int runs_total = 0;
    int runs_qualifying = 0; // natural max backlog stayed below the threshold
    std::vector<PairedViolation> violations;

    bool clean() const { return violations.empty(); }
};

// Replays each arrival stream twice: once untouched, once with an injection
// schedule against the threshold rule. On streams whose natural peak stays
// below the threshold, the rule must hold the post-allocation backlog within
// one chunk of the threshold and must never outspend the injections by more
// than one chunk per burst.
inline PairedCheckReport paired_s1_guarantee_check(
    const GameConfig& cfg, const std::vector<std::vector<long long>>& attacker_schedules,
    long long threshold, int runs, std::uint64_t seed) {
    cfg.validate();
    if (cfg.queue.disturbance.mode != DisturbanceModel::Mode::Fixed)
        throw std::invalid_argument("paired check: requires the fixed service-rate mode");
    if (cfg.attacker_budget > cfg.defender_budget)
        throw std::invalid_argument("paired check: requires attacker budget <= defender");
    if (runs < 1) throw std::invalid_argument("paired check: runs must be >= 1");

    RulePolicyConfig rule;
    rule.threshold = threshold;
    rule.chunk = cfg.defender_chunk;
    rule.per_hour_cap = cfg.per_hour_cap;
    rule.anchor_low = cfg.cost_anchor_low;

    PairedCheckReport report;
    report.runs_total = runs;
    const long long capacity = std::llround(cfg.queue.mu_nominal);

    for (int run = 0; run < runs; ++run) {
        // one shared arrival stream per run
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(run)));
        std::vector<long long> arrivals(static_cast<std::size_t>(cfg.horizon_hours));
        for (auto& a : arrivals) a = poisson_arrivals(cfg.queue.lambda_nominal, rng);

        // natural run
        long long b_nat = cfg.initial_backlog;
        long long nat_max = b_nat;
        for (long long a : arrivals) {
            b_nat = step_backlog(b_nat, a, capacity).backlog_after;
            nat_max = std::max(nat_max, b_nat);
        }
        if (nat_max >= threshold) continue;
        ++report.runs_qualifying;

        for (std::size_t sched_idx = 0; sched_idx < attacker_schedules.size(); ++sched_idx) {
            const auto& schedule = attacker_schedules[sched_idx];
            long long b_def = cfg.initial_backlog;
            long long x = cfg.defender_budget;
            long long y = cfg.attacker_budget;
            long long total_spend = 0;
            long long total_injected = 0;
            long long bursts = 0;

            for (int hour = 0; hour < cfg.horizon_hours; ++hour) {
                const DefenderObservation obs{b_def, cfg.horizon_hours - hour, x, 0};
                const long long d = s1_decide(obs, rule);
                const long long spend = std::min(d, x);
                x -= spend;
                total_spend += spend;
                const long long post_allocation = std::max(0LL, b_def - spend);
                if (post_allocation > threshold + cfg.defender_chunk) {
                    report.violations.push_back(
                        {run, sched_idx, hour + 1,
                         "post-allocation backlog " + std::to_string(post_allocation) +
                             " above threshold + chunk"});
                }
                long long requested =
                    hour < static_cast<int>(schedule.size()) ? schedule[hour] : 0;
                const long long injected = std::min(requested, y);
                y -= injected;
                if (injected > 0) ++bursts;
                total_injected += injected;
                b_def = step_backlog(post_allocation,
                                     arrivals[static_cast<std::size_t>(hour)] + injected,
                                     capacity)
                            .backlog_after;
            }
            if (total_spend > total_injected + cfg.defender_chunk * bursts) {
                report.violations.push_back(
                    {run, sched_idx, 0,
                     "defender spend " + std::to_string(total_spend) +
                         " exceeds injections " + std::to_string(total_injected) + " + " +
                         std::to_string(cfg.defender_chunk) + " per burst (" +
                         std::to_string(bursts) + " bursts)"});
            }
        }
    }
    return report;
}

// Per-hour injection schedule of the dump attacker: cap every hour until the
// budget runs out.
inline std::vector<long long> dump_schedule(long long budget, long long per_hour_cap,
                                            int horizon_hours) {
    std::vector<long long> schedule(static_cast<std::size_t>(horizon_hours), 0);
    long long remaining = budget;
    for (auto& a : schedule) {
        if (remaining <= 0) break;
        a = std::min(per_hour_cap, remaining);
        remaining -= a;
    }
    return schedule;
}

} // namespace csoc
