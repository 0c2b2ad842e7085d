#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "csoc/rng.hpp"

namespace csoc {

// How the effective hourly service rate deviates from the nominal mu.
// Fixed pins mu to the nominal value; HourlyMultiplicative draws a factor
// in (0, 1] each hour, so the effective rate only ever degrades.
struct DisturbanceModel {
    enum class Mode { Fixed, HourlyMultiplicative };

    Mode mode = Mode::HourlyMultiplicative;
    // (factor, probability) pairs; factors in (0, 1], probabilities sum to 1.
    std::vector<std::pair<double, double>> factor_pmf = {{1.0, 0.95}, {0.975, 0.05}};

    static DisturbanceModel fixed() {
        DisturbanceModel d;
        d.mode = Mode::Fixed;
        d.factor_pmf = {{1.0, 1.0}};
        return d;
    }

    void validate() const {
        if (mode == Mode::Fixed) return;
        if (factor_pmf.empty()) throw std::invalid_argument("disturbance: empty factor pmf");
        double total = 0.0;
        for (const auto& [factor, prob] : factor_pmf) {
            if (!(factor > 0.0 && factor <= 1.0))
                throw std::invalid_argument("disturbance: factor must lie in (0, 1]");
            if (!(prob >= 0.0)) throw std::invalid_argument("disturbance: negative probability");
            total += prob;
        }
        if (std::abs(total - 1.0) > 1e-9)
            throw std::invalid_argument("disturbance: probabilities must sum to 1");
    }

    // Effective integer service capacity for one hour. Never exceeds the
    // nominal capacity because factors are capped at 1.
    long long sample_capacity(double mu_nominal, Rng& rng) const {
        if (mode == Mode::Fixed) return std::llround(mu_nominal);
        double u = rng.uniform01();
        double factor = factor_pmf.back().first;
        for (const auto& [f, p] : factor_pmf) {
            if (u < p) {
                factor = f;
                break;
            }
            u -= p;
        }
        return std::llround(mu_nominal * factor);
    }
};

struct QueueParams {
    double lambda_nominal = 1919.0; // alerts/hour
    double mu_nominal = 1920.0;     // alerts/hour
    DisturbanceModel disturbance;

    void validate() const {
        if (!(lambda_nominal > 0.0) || !std::isfinite(lambda_nominal))
            throw std::invalid_argument("queue: lambda must be positive and finite");
        if (!(mu_nominal > 0.0) || !std::isfinite(mu_nominal))
            throw std::invalid_argument("queue: mu must be positive and finite");
        if (!(lambda_nominal / mu_nominal < 1.0))
            throw std::invalid_argument("queue: utilization lambda/mu must be < 1");
        disturbance.validate();
    }

    double utilization() const { return lambda_nominal / mu_nominal; }
};

// One hour of the aggregated queue: arrivals in, served out, backlog left.
struct HourOutcome {
    long long arrivals = 0;
    long long served = 0;
    long long backlog_after = 0;
};

namespace detail {

inline long long poisson_inversion(double rate, Rng& rng) {
    const double u = rng.uniform01();
    double p = std::exp(-rate);
    double cumulative = p;
    long long k = 0;
    while (u > cumulative && k < 1000000) {
        ++k;
        p *= rate / static_cast<double>(k);
        cumulative += p;
    }
    return k;
}

// Transformed-rejection sampler (Hoermann's PTRS). Exact for rate >= 10;
// used here from 30 up, inversion below.
inline long long poisson_ptrs(double rate, Rng& rng) {
    const double log_rate = std::log(rate);
    const double b = 0.931 + 2.53 * std::sqrt(rate);
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);

    for (;;) {
        const double u = rng.uniform01() - 0.5;
        const double v = rng.uniform01();
        const double us = 0.5 - std::abs(u);
        const double kf = std::floor((2.0 * a / us + b) * u + rate + 0.43);
        if (us >= 0.07 && v <= v_r) return static_cast<long long>(kf);
        if (kf < 0.0 || (us < 0.013 && v > us)) continue;
        const double k = kf;
        if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
            k * log_rate - rate - std::lgamma(k + 1.0)) {
            return static_cast<long long>(kf);
        }
    }
}

} // namespace detail

// Exact Poisson sample. Deterministic given (rate, rng state).
inline long long poisson_arrivals(double rate, Rng& rng) {
    if (!std::isfinite(rate) || !(rate > 0.0))
        throw std::invalid_argument("poisson_arrivals: rate must be positive and finite");
    return rate < 30.0 ? detail::poisson_inversion(rate, rng)
                       : detail::poisson_ptrs(rate, rng);
}

// Net one hour of the queue: add arrivals, serve up to capacity, floor at 0.
inline HourOutcome step_backlog(long long prev_backlog, long long arrivals,
                                long long capacity) {
    if (prev_backlog < 0 || arrivals < 0 || capacity < 0)
        throw std::invalid_argument("step_backlog: inputs must be nonnegative");
    const long long offered = prev_backlog + arrivals;
    const long long served = std::min(capacity, offered);
    return HourOutcome{arrivals, served, offered - served};
}

// Interior-state hourly transition kernel P(A - Z = delta) with the server
// busy the whole hour (Z = mu). The zero boundary of the real chain is not
// represented here; simulate_natural_trace applies the floor instead.
inline double transition_pmf(double lambda, long long mu, long long delta) {
    if (!std::isfinite(lambda) || !(lambda > 0.0))
        throw std::invalid_argument("transition_pmf: lambda must be positive and finite");
    if (mu < 0) throw std::invalid_argument("transition_pmf: mu must be >= 0");
    const long long k = delta + mu;
    if (k < 0) return 0.0;
    const double kd = static_cast<double>(k);
    return std::exp(kd * std::log(lambda) - lambda - std::lgamma(kd + 1.0));
}

// Attack-free hourly trace: Poisson arrivals against the (possibly
// disturbed) deterministic service capacity, chained through step_backlog.
inline std::vector<HourOutcome> simulate_natural_trace(const QueueParams& params,
                                                       int horizon_hours,
                                                       std::uint64_t seed,
                                                       long long initial_backlog = 1175) {
    params.validate();
    if (horizon_hours < 1)
        throw std::invalid_argument("simulate_natural_trace: horizon must be >= 1");
    if (initial_backlog < 0)
        throw std::invalid_argument("simulate_natural_trace: initial backlog must be >= 0");

    Rng rng(seed);
    std::vector<HourOutcome> trace;
    trace.reserve(static_cast<std::size_t>(horizon_hours));
    long long backlog = initial_backlog;
    for (int hour = 0; hour < horizon_hours; ++hour) {
        const long long arrivals = poisson_arrivals(params.lambda_nominal, rng);
        const long long capacity = params.disturbance.sample_capacity(params.mu_nominal, rng);
        HourOutcome outcome = step_backlog(backlog, arrivals, capacity);
        backlog = outcome.backlog_after;
        trace.push_back(outcome);
    }
    return trace;
}

} // namespace csoc
