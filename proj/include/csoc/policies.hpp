#pragma once

#include <algorithm>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "csoc/game.hpp"
#include "csoc/queue.hpp"
#include "csoc/rng.hpp"

namespace csoc {

inline long long round_up_to_chunk(long long value, long long chunk) {
    if (value <= 0) return 0;
    return ((value + chunk - 1) / chunk) * chunk;
}

inline long long round_down_to_chunk(long long value, long long chunk) {
    if (value <= 0) return 0;
    return (value / chunk) * chunk;
}

// ---------------------------------------------------------------------------
// Trivial policies
// ---------------------------------------------------------------------------

class ZeroDefender final : public DefenderPolicy {
public:
    long long act(const DefenderObservation&) override { return 0; }
    PolicyManifest manifest() const override { return PolicyManifest{"zero_defender", {}, {}}; }
    std::unique_ptr<DefenderPolicy> clone() const override {
        return std::make_unique<ZeroDefender>(*this);
    }
};

// Requests the full per-hour cap every hour until the budget runs dry.
class FullSpendDefender final : public DefenderPolicy {
public:
    explicit FullSpendDefender(long long per_hour_cap) : cap_(per_hour_cap) {}
    long long act(const DefenderObservation& obs) override {
        return obs.defender_remaining > 0 ? cap_ : 0;
    }
    PolicyManifest manifest() const override {
        return PolicyManifest{"full_spend_defender", {{"cap", std::to_string(cap_)}}, {}};
    }
    std::unique_ptr<DefenderPolicy> clone() const override {
        return std::make_unique<FullSpendDefender>(*this);
    }

private:
    long long cap_;
};

class ZeroAttacker final : public AttackerPolicy {
public:
    long long act(const AttackerObservation&) override { return 0; }
    PolicyManifest manifest() const override { return PolicyManifest{"zero_attacker", {}, {}}; }
    std::unique_ptr<AttackerPolicy> clone() const override {
        return std::make_unique<ZeroAttacker>(*this);
    }
};

// ---------------------------------------------------------------------------
// Rule-based defenders
// ---------------------------------------------------------------------------

struct RulePolicyConfig {
    long long threshold = 2233;   // B
    bool aggressive = false;      // false: match the excess; true: also clear down to the low anchor
    long long chunk = 60;         // M_d
    long long per_hour_cap = 2400;
    long long anchor_low = 1175;

    void validate() const {
        if (threshold < anchor_low)
            throw std::invalid_argument("rule policy: threshold below low cost anchor");
        if (chunk < 1) throw std::invalid_argument("rule policy: chunk must be >= 1");
        if (per_hour_cap < 0) throw std::invalid_argument("rule policy: cap must be >= 0");
    }
};

// Allocate the backlog excess over the threshold, rounded up to the chunk so
// the excess is always fully covered when the cap and budget allow.
inline long long s1_decide(const DefenderObservation& obs, const RulePolicyConfig& cfg) {
    const long long raw = std::max(0LL, obs.backlog - cfg.threshold);
    return std::min(cfg.per_hour_cap, round_up_to_chunk(raw, cfg.chunk));
}

// Aggressive variant: once triggered, also clear the band between the
// threshold and the low anchor, driving the backlog back to the anchor.
inline long long s2_decide(const DefenderObservation& obs, const RulePolicyConfig& cfg) {
    long long raw = std::max(0LL, obs.backlog - cfg.threshold);
    if (raw > 0) raw += cfg.threshold - cfg.anchor_low;
    return std::min(cfg.per_hour_cap, round_up_to_chunk(raw, cfg.chunk));
}

class RuleDefender final : public DefenderPolicy {
public:
    explicit RuleDefender(RulePolicyConfig cfg) : cfg_(cfg) { cfg_.validate(); }

    long long act(const DefenderObservation& obs) override {
        return cfg_.aggressive ? s2_decide(obs, cfg_) : s1_decide(obs, cfg_);
    }
    PolicyManifest manifest() const override {
        return PolicyManifest{cfg_.aggressive ? "s2_defender" : "s1_defender",
                              {{"threshold", std::to_string(cfg_.threshold)},
                               {"chunk", std::to_string(cfg_.chunk)},
                               {"cap", std::to_string(cfg_.per_hour_cap)},
                               {"anchor_low", std::to_string(cfg_.anchor_low)}},
                              {}};
    }
    std::unique_ptr<DefenderPolicy> clone() const override {
        return std::make_unique<RuleDefender>(*this);
    }

    const RulePolicyConfig& config() const { return cfg_; }

private:
    RulePolicyConfig cfg_;
};

// ---------------------------------------------------------------------------
// Attackers
// ---------------------------------------------------------------------------

// Sends the per-hour maximum every hour until the budget is exhausted; the
// environment clamps the final partial hour. A nonzero start hour delays the
// barrage, which is how training mixtures cover late-game bursts.
class DumpAttacker final : public AttackerPolicy {
public:
    explicit DumpAttacker(long long per_hour_cap, int start_hour = 0)
        : cap_(per_hour_cap), start_hour_(start_hour) {}

    void begin_episode(std::uint64_t) override { hour_ = 0; }

    long long act(const AttackerObservation& obs) override {
        const bool active = hour_ >= start_hour_;
        ++hour_;
        return active && obs.state.attacker_remaining > 0 ? cap_ : 0;
    }
    PolicyManifest manifest() const override {
        return PolicyManifest{"dump_attacker",
                              {{"cap", std::to_string(cap_)},
                               {"start_hour", std::to_string(start_hour_)}},
                              {}};
    }
    std::unique_ptr<AttackerPolicy> clone() const override {
        return std::make_unique<DumpAttacker>(*this);
    }

private:
    long long cap_;
    int start_hour_ = 0;
    int hour_ = 0;
};

struct DailyBound {
    long long per_day_limit = 2057; // alerts per calendar day
    int day_length = 24;            // hours

    void validate() const {
        if (per_day_limit < 0) throw std::invalid_argument("daily bound: limit must be >= 0");
        if (day_length < 1) throw std::invalid_argument("daily bound: day length must be >= 1");
    }
};

// Truncates the wrapped policy so its spend in every calendar-day window
// (hours 1..24, 25..48, ...) stays within the limit, chunk-floored.
class DailyBoundedAttacker final : public AttackerPolicy {
public:
    DailyBoundedAttacker(std::unique_ptr<AttackerPolicy> inner, DailyBound bound,
                         long long chunk)
        : inner_(std::move(inner)), bound_(bound), chunk_(chunk) {
        bound_.validate();
        if (chunk_ < 1) throw std::invalid_argument("daily bound: chunk must be >= 1");
    }

    DailyBoundedAttacker(const DailyBoundedAttacker& other)
        : inner_(other.inner_->clone()), bound_(other.bound_), chunk_(other.chunk_),
          hour_(other.hour_), spent_today_(other.spent_today_) {}

    void begin_episode(std::uint64_t seed) override {
        hour_ = 0;
        spent_today_ = 0;
        inner_->begin_episode(seed);
    }

    long long act(const AttackerObservation& obs) override {
        if (hour_ % bound_.day_length == 0) spent_today_ = 0;
        ++hour_;
        const long long requested = inner_->act(obs);
        const long long allowance =
            round_down_to_chunk(bound_.per_day_limit - spent_today_, chunk_);
        const long long emitted = std::clamp(requested, 0LL, allowance);
        spent_today_ += emitted;
        return emitted;
    }

    PolicyManifest manifest() const override {
        return PolicyManifest{"daily_bounded",
                              {{"per_day_limit", std::to_string(bound_.per_day_limit)},
                               {"day_length", std::to_string(bound_.day_length)},
                               {"chunk", std::to_string(chunk_)}},
                              {inner_->manifest()}};
    }
    std::unique_ptr<AttackerPolicy> clone() const override {
        return std::make_unique<DailyBoundedAttacker>(*this);
    }

private:
    std::unique_ptr<AttackerPolicy> inner_;
    DailyBound bound_;
    long long chunk_;
    int hour_ = 0;
    long long spent_today_ = 0;
};

inline std::unique_ptr<AttackerPolicy> daily_bounded(std::unique_ptr<AttackerPolicy> inner,
                                                     DailyBound bound, long long chunk) {
    return std::make_unique<DailyBoundedAttacker>(std::move(inner), bound, chunk);
}

// Each hour: sample an extra arrival rate from a discrete distribution, draw
// Poisson at that rate, floor to the chunk. Mimics the fixed stochastic
// opponent the original defender was trained against.
class StochasticRateAttacker final : public AttackerPolicy {
public:
    StochasticRateAttacker(std::vector<std::pair<double, double>> rate_pmf, long long chunk,
                           long long per_hour_cap)
        : rate_pmf_(std::move(rate_pmf)), chunk_(chunk), cap_(per_hour_cap), rng_(0) {
        if (rate_pmf_.empty())
            throw std::invalid_argument("stochastic attacker: empty rate distribution");
        double total = 0.0;
        for (const auto& [rate, prob] : rate_pmf_) {
            if (rate < 0.0) throw std::invalid_argument("stochastic attacker: negative rate");
            if (prob < 0.0)
                throw std::invalid_argument("stochastic attacker: negative probability");
            total += prob;
        }
        if (std::abs(total - 1.0) > 1e-9)
            throw std::invalid_argument("stochastic attacker: probabilities must sum to 1");
    }

    void begin_episode(std::uint64_t seed) override { rng_ = Rng(seed); }

    long long act(const AttackerObservation&) override {
        double u = rng_.uniform01();
        double rate = rate_pmf_.back().first;
        for (const auto& [r, p] : rate_pmf_) {
            if (u < p) {
                rate = r;
                break;
            }
            u -= p;
        }
        if (rate <= 0.0) return 0;
        const long long draw = poisson_arrivals(rate, rng_);
        return std::min(cap_, round_down_to_chunk(draw, chunk_));
    }

    PolicyManifest manifest() const override {
        std::string rates;
        for (const auto& [r, p] : rate_pmf_) {
            if (!rates.empty()) rates += ";";
            rates += std::to_string(r) + ":" + std::to_string(p);
        }
        return PolicyManifest{"stochastic_rate_attacker",
                              {{"rates", rates},
                               {"chunk", std::to_string(chunk_)},
                               {"cap", std::to_string(cap_)}},
                              {}};
    }
    std::unique_ptr<AttackerPolicy> clone() const override {
        return std::make_unique<StochasticRateAttacker>(*this);
    }

private:
    std::vector<std::pair<double, double>> rate_pmf_;
    long long chunk_;
    long long cap_;
    Rng rng_;
};

} // namespace csoc
