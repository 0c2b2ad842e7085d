#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "csoc/queue.hpp"
#include "csoc/rng.hpp"

namespace csoc {

// Piecewise-linear backlog cost: 0 at or below the low anchor, 1 at or above
// the high anchor, linear between.
struct CostFunction {
    long long anchor_low = 1175;
    long long anchor_high = 4350;

    double operator()(double backlog) const {
        if (backlog <= static_cast<double>(anchor_low)) return 0.0;
        if (backlog >= static_cast<double>(anchor_high)) return 1.0;
        return (backlog - static_cast<double>(anchor_low)) /
               static_cast<double>(anchor_high - anchor_low);
    }
};

struct GameConfig {
    QueueParams queue;
    int horizon_hours = 336;             // N
    long long defender_budget = 28800;   // X, additional inspections
    long long attacker_budget = 28800;   // Y, additional alerts
    long long per_hour_cap = 2400;       // E, cap on both actions per hour
    long long defender_chunk = 60;       // M_d
    long long attacker_chunk = 60;       // M_a
    long long cost_anchor_low = 1175;
    long long cost_anchor_high = 4350;
    double shaping_weight = 0.1;
    long long initial_backlog = 1175;
    // true: attacker actions capped at E like the defender's.
    // false: capped by the total budget instead (the uncapped RL variant).
    bool attacker_hour_capped = true;

    CostFunction cost() const { return CostFunction{cost_anchor_low, cost_anchor_high}; }

    void validate() const {
        queue.validate();
        if (horizon_hours < 1) throw std::invalid_argument("config: horizon must be >= 1");
        if (defender_budget < 0 || attacker_budget < 0)
            throw std::invalid_argument("config: budgets must be >= 0");
        if (per_hour_cap < 0) throw std::invalid_argument("config: per-hour cap must be >= 0");
        if (defender_chunk < 1 || attacker_chunk < 1)
            throw std::invalid_argument("config: chunks must be >= 1");
        if (per_hour_cap % defender_chunk != 0)
            throw std::invalid_argument("config: defender chunk must divide per-hour cap");
        if (per_hour_cap % attacker_chunk != 0)
            throw std::invalid_argument("config: attacker chunk must divide per-hour cap");
        if (cost_anchor_low >= cost_anchor_high)
            throw std::invalid_argument("config: cost anchors must satisfy low < high");
        if (initial_backlog < 0)
            throw std::invalid_argument("config: initial backlog must be >= 0");
        if (!(shaping_weight >= 0.0) || !std::isfinite(shaping_weight))
            throw std::invalid_argument("config: shaping weight must be >= 0 and finite");
    }
};

// Full-scale operating point.
inline GameConfig paper_config() {
    GameConfig cfg;
    cfg.queue.lambda_nominal = 1919.0;
    cfg.queue.mu_nominal = 1920.0;
    return cfg;
}

// Shrunk operating point with the same structural ratios; tabular training
// converges in seconds here. Anchors 60/240 keep the 1h..4h span at roughly
// one hour of service. The heavier shaping weight is what makes budget
// preservation learnable at this scale, where one chunk moves the cost by a
// third of the whole band.
inline GameConfig desk_config() {
    GameConfig cfg;
    cfg.queue.lambda_nominal = 90.0;
    cfg.queue.mu_nominal = 96.0;
    cfg.horizon_hours = 48;
    cfg.defender_budget = 1200;
    cfg.attacker_budget = 1200;
    cfg.per_hour_cap = 120;
    cfg.defender_chunk = 60;
    cfg.attacker_chunk = 60;
    cfg.cost_anchor_low = 60;
    cfg.cost_anchor_high = 240;
    cfg.shaping_weight = 0.3;
    cfg.initial_backlog = 60;
    return cfg;
}

// <b, n, x, y>
struct GameState {
    long long backlog = 0;
    int remaining_hours = 0;
    long long defender_remaining = 0;
    long long attacker_remaining = 0;

    bool terminal() const { return remaining_hours == 0; }
};

// What the defender sees: its own side of the state plus its own last move.
// The attacker's action and remaining budget are never present.
struct DefenderObservation {
    long long backlog = 0;
    int remaining_hours = 0;
    long long defender_remaining = 0;
    long long last_defender_action = 0;
};

// The attacker observes everything.
struct AttackerObservation {
    GameState state;
    long long last_defender_action = 0;
    long long last_attacker_action = 0;
};

inline DefenderObservation make_defender_observation(const GameState& s, long long last_d) {
    return DefenderObservation{s.backlog, s.remaining_hours, s.defender_remaining, last_d};
}

inline AttackerObservation make_attacker_observation(const GameState& s, long long last_d,
                                                     long long last_a) {
    return AttackerObservation{s, last_d, last_a};
}

inline GameState initial_state(const GameConfig& cfg) {
    cfg.validate();
    return GameState{cfg.initial_backlog, cfg.horizon_hours, cfg.defender_budget,
                     cfg.attacker_budget};
}

// The action sets are fixed for the whole game; budget feasibility is
// enforced inside the transition via min(action, remaining), never by
// shrinking the set.
inline std::vector<long long> legal_actions_defender(const GameConfig& cfg) {
    std::vector<long long> actions;
    for (long long d = 0; d <= cfg.per_hour_cap; d += cfg.defender_chunk)
        actions.push_back(d);
    return actions;
}

inline long long attacker_action_cap(const GameConfig& cfg) {
    if (cfg.attacker_hour_capped) return cfg.per_hour_cap;
    return (cfg.attacker_budget / cfg.attacker_chunk) * cfg.attacker_chunk;
}

inline std::vector<long long> legal_actions_attacker(const GameConfig& cfg) {
    std::vector<long long> actions;
    const long long cap = attacker_action_cap(cfg);
    for (long long a = 0; a <= cap; a += cfg.attacker_chunk)
        actions.push_back(a);
    return actions;
}

inline bool is_legal_defender_action(const GameConfig& cfg, long long d) {
    return d >= 0 && d <= cfg.per_hour_cap && d % cfg.defender_chunk == 0;
}

inline bool is_legal_attacker_action(const GameConfig& cfg, long long a) {
    return a >= 0 && a <= attacker_action_cap(cfg) && a % cfg.attacker_chunk == 0;
}

// Stage cost f(b - min(d, x)), evaluated after allocation, before the hour's
// arrivals. The floor keeps an over-cleared backlog at zero.
inline double defender_cost(const GameConfig& cfg, const GameState& s, long long d) {
    const long long spend = std::min(d, s.defender_remaining);
    const long long post_allocation = std::max(0LL, s.backlog - spend);
    return cfg.cost()(static_cast<double>(post_allocation));
}

// Budget-preservation shaping: 0.5 at the budget-neutral spend rate
// remaining/hours == initial/N, clamped to [0, 1]. Zero when there is no
// budget to preserve.
inline double budget_shaping(long long remaining, int hours_left, long long initial_budget,
                             int horizon_hours) {
    if (initial_budget <= 0) return 0.0;
    const double neutral_rate =
        static_cast<double>(initial_budget) / static_cast<double>(horizon_hours);
    const double rate = static_cast<double>(remaining) /
                        static_cast<double>(std::max(hours_left, 1));
    return std::clamp(0.5 * rate / neutral_rate, 0.0, 1.0);
}

inline double shaped_reward_defender(const GameConfig& cfg, const GameState& s, long long d) {
    const long long x_next = std::max(0LL, s.defender_remaining - d);
    const int n_next = s.remaining_hours - 1;
    return -defender_cost(cfg, s, d) +
           cfg.shaping_weight *
               budget_shaping(x_next, n_next, cfg.defender_budget, cfg.horizon_hours);
}

inline double shaped_reward_attacker(const GameConfig& cfg, const GameState& s, long long d,
                                     long long a) {
    const long long y_next = std::max(0LL, s.attacker_remaining - a);
    const int n_next = s.remaining_hours - 1;
    return defender_cost(cfg, s, d) +
           cfg.shaping_weight *
               budget_shaping(y_next, n_next, cfg.attacker_budget, cfg.horizon_hours);
}

struct StepResult {
    GameState next;
    DefenderObservation defender_obs;
    AttackerObservation attacker_obs;
    double stage_cost = 0.0;
    long long defender_spent = 0;  // min(d, x)
    long long injected = 0;        // min(a, y)
    long long post_allocation_backlog = 0;
    HourOutcome hour;
};

// One hour of the game. Injected alerts join the same hour's arrival pool
// before service. Surplus allocations are spent, not banked.
inline StepResult step(const GameConfig& cfg, const GameState& s, long long d, long long a,
                       Rng& rng) {
    if (s.terminal()) throw std::logic_error("step: state is terminal (n = 0)");
    if (!is_legal_defender_action(cfg, d)) {
        std::ostringstream oss;
        oss << "step: illegal defender action " << d << " (chunk " << cfg.defender_chunk
            << ", cap " << cfg.per_hour_cap << ")";
        throw std::invalid_argument(oss.str());
    }
    if (!is_legal_attacker_action(cfg, a)) {
        std::ostringstream oss;
        oss << "step: illegal attacker action " << a << " (chunk " << cfg.attacker_chunk
            << ", cap " << attacker_action_cap(cfg) << ")";
        throw std::invalid_argument(oss.str());
    }

    StepResult r;
    r.defender_spent = std::min(d, s.defender_remaining);
    r.injected = std::min(a, s.attacker_remaining);
    r.post_allocation_backlog = std::max(0LL, s.backlog - r.defender_spent);
    r.stage_cost = cfg.cost()(static_cast<double>(r.post_allocation_backlog));

    const long long arrivals = poisson_arrivals(cfg.queue.lambda_nominal, rng);
    const long long capacity =
        cfg.queue.disturbance.sample_capacity(cfg.queue.mu_nominal, rng);
    r.hour = step_backlog(r.post_allocation_backlog, arrivals + r.injected, capacity);
    r.hour.arrivals = arrivals; // natural arrivals only; injections tracked separately

    r.next.backlog = r.hour.backlog_after;
    r.next.remaining_hours = s.remaining_hours - 1;
    r.next.defender_remaining = std::max(0LL, s.defender_remaining - d);
    r.next.attacker_remaining = std::max(0LL, s.attacker_remaining - a);
    r.defender_obs = make_defender_observation(r.next, d);
    r.attacker_obs = make_attacker_observation(r.next, d, a);
    return r;
}

struct ResetResult {
    GameState state;
    DefenderObservation defender_obs;
    AttackerObservation attacker_obs;
};

inline ResetResult reset(const GameConfig& cfg) {
    GameState s = initial_state(cfg);
    return ResetResult{s, make_defender_observation(s, 0), make_attacker_observation(s, 0, 0)};
}

// Serializable description of a policy: kind plus flat parameters, with
// nested descriptions for wrappers.
struct PolicyManifest {
    std::string kind;
    std::vector<std::pair<std::string, std::string>> params;
    std::vector<PolicyManifest> children;

    std::string to_string() const {
        std::ostringstream oss;
        oss << kind << "{";
        bool first = true;
        for (const auto& [k, v] : params) {
            if (!first) oss << ",";
            oss << k << "=" << v;
            first = false;
        }
        for (const auto& child : children) {
            if (!first) oss << ",";
            oss << "inner=" << child.to_string();
            first = false;
        }
        oss << "}";
        return oss.str();
    }
};

class DefenderPolicy {
public:
    virtual ~DefenderPolicy() = default;
    virtual void begin_episode(std::uint64_t /*seed*/) {}
    virtual long long act(const DefenderObservation& obs) = 0;
    virtual PolicyManifest manifest() const = 0;
    virtual std::unique_ptr<DefenderPolicy> clone() const = 0;
};

class AttackerPolicy {
public:
    virtual ~AttackerPolicy() = default;
    virtual void begin_episode(std::uint64_t /*seed*/) {}
    virtual long long act(const AttackerObservation& obs) = 0;
    virtual PolicyManifest manifest() const = 0;
    virtual std::unique_ptr<AttackerPolicy> clone() const = 0;
};

struct HourRecord {
    int hour = 0;                        // 1-based
    long long backlog_pre = 0;           // start of hour, before allocation
    long long defender_action = 0;       // requested d
    long long attacker_action = 0;       // requested a
    long long backlog_post = 0;          // end of hour, after arrivals/service
    long long defender_remaining = 0;    // x after the hour
    long long attacker_remaining = 0;    // y after the hour
    double stage_cost = 0.0;
    // not part of the CSV schema, kept for analysis
    long long post_allocation_backlog = 0;
    long long defender_spent = 0;
    long long injected = 0;
    long long arrivals = 0;
    long long served = 0;
};

struct RunTrace {
    long long initial_backlog = 0;
    std::vector<HourRecord> hours;
    double sup_cost = 0.0;     // max stage cost over the play
    long long max_backlog = 0; // max end-of-hour backlog, including the start

    long long total_defender_spend() const {
        long long total = 0;
        for (const auto& h : hours) total += h.defender_spent;
        return total;
    }
    long long total_injected() const {
        long long total = 0;
        for (const auto& h : hours) total += h.injected;
        return total;
    }
};

// Seed streams inside one episode.
namespace seed_stream {
inline constexpr std::uint64_t kEnv = 0;
inline constexpr std::uint64_t kDefender = 1;
inline constexpr std::uint64_t kAttacker = 2;
} // namespace seed_stream

// Play out one full game. All randomness (environment draws and any policy
// randomness) derives from the single seed.
inline RunTrace episode(DefenderPolicy& defender, AttackerPolicy& attacker,
                        const GameConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    Rng env_rng(derive_seed(seed, seed_stream::kEnv));
    defender.begin_episode(derive_seed(seed, seed_stream::kDefender));
    attacker.begin_episode(derive_seed(seed, seed_stream::kAttacker));

    RunTrace trace;
    GameState state = initial_state(cfg);
    trace.initial_backlog = state.backlog;
    trace.max_backlog = state.backlog;
    trace.hours.reserve(static_cast<std::size_t>(cfg.horizon_hours));

    long long last_d = 0;
    long long last_a = 0;
    for (int hour = 1; hour <= cfg.horizon_hours; ++hour) {
        const DefenderObservation def_obs = make_defender_observation(state, last_d);
        const AttackerObservation atk_obs = make_attacker_observation(state, last_d, last_a);
        const long long d = defender.act(def_obs);
        const long long a = attacker.act(atk_obs);
        if (!is_legal_defender_action(cfg, d)) {
            std::ostringstream oss;
            oss << "episode: defender policy " << defender.manifest().to_string()
                << " emitted illegal action " << d << " at hour " << hour;
            throw std::runtime_error(oss.str());
        }
        if (!is_legal_attacker_action(cfg, a)) {
            std::ostringstream oss;
            oss << "episode: attacker policy " << attacker.manifest().to_string()
                << " emitted illegal action " << a << " at hour " << hour;
            throw std::runtime_error(oss.str());
        }

        const StepResult r = step(cfg, state, d, a, env_rng);
        HourRecord rec;
        rec.hour = hour;
        rec.backlog_pre = state.backlog;
        rec.defender_action = d;
        rec.attacker_action = a;
        rec.backlog_post = r.next.backlog;
        rec.defender_remaining = r.next.defender_remaining;
        rec.attacker_remaining = r.next.attacker_remaining;
        rec.stage_cost = r.stage_cost;
        rec.post_allocation_backlog = r.post_allocation_backlog;
        rec.defender_spent = r.defender_spent;
        rec.injected = r.injected;
        rec.arrivals = r.hour.arrivals;
        rec.served = r.hour.served;
        trace.hours.push_back(rec);

        trace.sup_cost = std::max(trace.sup_cost, r.stage_cost);
        trace.max_backlog = std::max(trace.max_backlog, r.next.backlog);
        state = r.next;
        last_d = d;
        last_a = a;
    }
    return trace;
}

// FNV-1a over a canonical rendering of every config field. Persisted policies
// carry this hash and refuse to load against a different config.
inline std::uint64_t config_hash(const GameConfig& cfg) {
    std::ostringstream oss;
    oss.precision(17);
    oss << cfg.queue.lambda_nominal << '|' << cfg.queue.mu_nominal << '|'
        << static_cast<int>(cfg.queue.disturbance.mode) << '|';
    for (const auto& [f, p] : cfg.queue.disturbance.factor_pmf) oss << f << ':' << p << ';';
    oss << '|' << cfg.horizon_hours << '|' << cfg.defender_budget << '|' << cfg.attacker_budget
        << '|' << cfg.per_hour_cap << '|' << cfg.defender_chunk << '|' << cfg.attacker_chunk
        << '|' << cfg.cost_anchor_low << '|' << cfg.cost_anchor_high << '|'
        << cfg.shaping_weight << '|' << cfg.initial_backlog << '|' << cfg.attacker_hour_capped;
    const std::string repr = oss.str();
    std::uint64_t hash = 1469598103934665603ULL;
    for (unsigned char c : repr) {
        hash ^= c;
        hash *= 1099511628211ULL;
    }
    return hash;
}

} // namespace csoc
