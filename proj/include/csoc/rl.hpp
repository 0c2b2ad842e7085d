#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "csoc/game.hpp"
#include "csoc/policies.hpp"
#include "csoc/rng.hpp"

namespace csoc {

// State-space aggregation for the tabular learners. Backlog is clamped to the
// cap before binning, so everything above the cap shares the top bin.
struct Aggregation {
    long long backlog_bin = 60;
    long long backlog_cap = 6000;
    long long budget_bin = 1200;
    int hours_bin = 8;

    static Aggregation paper_default() { return Aggregation{60, 6000, 1200, 8}; }
    // The defender bins backlog at its own chunk size; the attacker sees a
    // finer grid, which is what lets it exploit the defender's discretization.
    static Aggregation desk_defender() { return Aggregation{60, 600, 120, 4}; }
    static Aggregation desk_attacker() { return Aggregation{30, 600, 120, 4}; }

    void validate(long long anchor_high) const {
        if (backlog_bin < 1 || budget_bin < 1 || hours_bin < 1)
            throw std::invalid_argument("aggregation: bins must be >= 1");
        if (backlog_cap < anchor_high)
            throw std::invalid_argument("aggregation: backlog cap must cover the high anchor");
    }
};

// Mixed-radix index over the aggregated (backlog, hours, defender budget
// [, attacker budget]) grid.
struct StateGrid {
    Aggregation agg;
    long long n_backlog = 0;
    long long n_hours = 0;
    long long n_defender = 0;
    long long n_attacker = 1; // 1 for the defender's 3-D grid

    static StateGrid defender(const GameConfig& cfg, const Aggregation& agg) {
        agg.validate(cfg.cost_anchor_high);
        StateGrid g;
        g.agg = agg;
        g.n_backlog = agg.backlog_cap / agg.backlog_bin + 1;
        g.n_hours = cfg.horizon_hours / agg.hours_bin + 1;
        g.n_defender = cfg.defender_budget / agg.budget_bin + 1;
        return g;
    }

    static StateGrid attacker(const GameConfig& cfg, const Aggregation& agg) {
        StateGrid g = defender(cfg, agg);
        g.n_attacker = cfg.attacker_budget / agg.budget_bin + 1;
        return g;
    }

    long long size() const { return n_backlog * n_hours * n_defender * n_attacker; }

    long long index(long long backlog, int hours, long long defender_budget,
                    long long attacker_budget) const {
        const long long ib = std::min(backlog, agg.backlog_cap) / agg.backlog_bin;
        const long long in = static_cast<long long>(hours) / agg.hours_bin;
        const long long ix = defender_budget / agg.budget_bin;
        const long long iy = attacker_budget / agg.budget_bin;
        if (in >= n_hours || ix >= n_defender || iy >= n_attacker || hours < 0 ||
            defender_budget < 0 || attacker_budget < 0)
            throw std::out_of_range("state grid: observation outside configured ranges");
        return ((ib * n_hours + in) * n_defender + ix) * n_attacker + iy;
    }
};

inline long long encode(const DefenderObservation& obs, const StateGrid& grid) {
    return grid.index(obs.backlog, obs.remaining_hours, obs.defender_remaining, 0);
}

inline long long encode(const AttackerObservation& obs, const StateGrid& grid) {
    return grid.index(obs.state.backlog, obs.state.remaining_hours,
                      obs.state.defender_remaining, obs.state.attacker_remaining);
}

struct Hyperparams {
    long long episodes = 30000;
    double epsilon_start = 1.0;
    double epsilon_end = 0.05;
    double gamma = 0.99;
    double lr_scale = 1.0;    // alpha = lr_scale / (1 + visits)^lr_exponent
    double lr_exponent = 0.6;

    void validate() const {
        if (episodes < 0) throw std::invalid_argument("hyper: episodes must be >= 0");
        if (!(epsilon_start >= epsilon_end))
            throw std::invalid_argument("hyper: epsilon schedule must be nonincreasing");
        if (epsilon_start < 0.0 || epsilon_start > 1.0 || epsilon_end < 0.0 ||
            epsilon_end > 1.0)
            throw std::invalid_argument("hyper: epsilon must lie in [0, 1]");
        if (!(gamma > 0.0 && gamma <= 1.0))
            throw std::invalid_argument("hyper: gamma must lie in (0, 1]");
        if (lr_scale < 0.0) throw std::invalid_argument("hyper: lr scale must be >= 0");
    }

    double epsilon_at(long long episode) const {
        if (episodes <= 1) return epsilon_start;
        const double t = static_cast<double>(episode) / static_cast<double>(episodes - 1);
        return epsilon_start + (epsilon_end - epsilon_start) * t;
    }
};

class QTable {
public:
    QTable() = default;
    QTable(long long n_states, long long n_actions)
        : n_states_(n_states), n_actions_(n_actions),
          values_(static_cast<std::size_t>(n_states * n_actions), 0.0),
          visits_(static_cast<std::size_t>(n_states * n_actions), 0) {}

    long long n_states() const { return n_states_; }
    long long n_actions() const { return n_actions_; }

    double value(long long s, long long a) const { return values_[offset(s, a)]; }
    std::uint32_t visits(long long s, long long a) const { return visits_[offset(s, a)]; }

    double max_value(long long s) const {
        double best = value(s, 0);
        for (long long a = 1; a < n_actions_; ++a) best = std::max(best, value(s, a));
        return best;
    }

    // Argmax with ties broken toward the lowest action index (least spend).
    long long greedy_action(long long s) const {
        long long best = 0;
        double best_value = value(s, 0);
        for (long long a = 1; a < n_actions_; ++a) {
            if (value(s, a) > best_value) {
                best = a;
                best_value = value(s, a);
            }
        }
        return best;
    }

    // Greedy restricted to a subset of action indices (must be nonempty,
    // ascending); used by budget-constrained selection.
    long long greedy_action_among(long long s, const std::vector<long long>& allowed) const {
        long long best = allowed.front();
        double best_value = value(s, best);
        for (std::size_t i = 1; i < allowed.size(); ++i) {
            const double v = value(s, allowed[i]);
            if (v > best_value) {
                best = allowed[i];
                best_value = v;
            }
        }
        return best;
    }

    // One-step Q-learning update; returns the new value. The learning rate is
    // lr_scale / (1 + visits)^lr_exponent with visits counted before this
    // update, so a fresh pair with lr_scale = 1 takes the full target.
    double update(long long s, long long a, double reward, long long s_next, bool terminal,
                  const Hyperparams& hyper) {
        const std::size_t idx = offset(s, a);
        const double alpha =
            hyper.lr_scale /
            std::pow(1.0 + static_cast<double>(visits_[idx]), hyper.lr_exponent);
        const double bootstrap = terminal ? 0.0 : hyper.gamma * max_value(s_next);
        values_[idx] += alpha * (reward + bootstrap - values_[idx]);
        ++visits_[idx];
        if (!std::isfinite(values_[idx])) {
            std::ostringstream oss;
            oss << "q_update: non-finite value at state " << s << " action " << a;
            throw std::runtime_error(oss.str());
        }
        return values_[idx];
    }

    const std::vector<double>& raw_values() const { return values_; }
    const std::vector<std::uint32_t>& raw_visits() const { return visits_; }
    std::vector<double>& raw_values() { return values_; }
    std::vector<std::uint32_t>& raw_visits() { return visits_; }

    bool operator==(const QTable& other) const {
        return n_states_ == other.n_states_ && n_actions_ == other.n_actions_ &&
               values_ == other.values_ && visits_ == other.visits_;
    }

private:
    std::size_t offset(long long s, long long a) const {
        if (s < 0 || s >= n_states_ || a < 0 || a >= n_actions_)
            throw std::out_of_range("qtable: index out of range");
        return static_cast<std::size_t>(s * n_actions_ + a);
    }

    long long n_states_ = 0;
    long long n_actions_ = 0;
    std::vector<double> values_;
    std::vector<std::uint32_t> visits_;
};

// ---------------------------------------------------------------------------
// Trained policies
// ---------------------------------------------------------------------------

enum class Player : std::uint8_t { Defender = 0, Attacker = 1 };

struct TrainedPolicyData {
    QTable table;
    StateGrid grid;
    std::vector<long long> actions;
    std::uint64_t config_hash_value = 0;
    std::uint64_t seed = 0;
    Hyperparams hyper;
    Player player = Player::Defender;
};

class TrainedDefenderPolicy final : public DefenderPolicy {
public:
    explicit TrainedDefenderPolicy(std::shared_ptr<const TrainedPolicyData> data)
        : data_(std::move(data)) {}

    long long act(const DefenderObservation& obs) override {
        const long long s = encode(obs, data_->grid);
        return data_->actions[static_cast<std::size_t>(data_->table.greedy_action(s))];
    }
    PolicyManifest manifest() const override {
        return PolicyManifest{"trained_defender",
                              {{"config_hash", std::to_string(data_->config_hash_value)},
                               {"seed", std::to_string(data_->seed)},
                               {"episodes", std::to_string(data_->hyper.episodes)}},
                              {}};
    }
    std::unique_ptr<DefenderPolicy> clone() const override {
        return std::make_unique<TrainedDefenderPolicy>(*this);
    }

    const TrainedPolicyData& data() const { return *data_; }

private:
    std::shared_ptr<const TrainedPolicyData> data_;
};

class TrainedAttackerPolicy final : public AttackerPolicy {
public:
    TrainedAttackerPolicy(std::shared_ptr<const TrainedPolicyData> data,
                          std::optional<DailyBound> bound = std::nullopt)
        : data_(std::move(data)), bound_(bound) {}

    void begin_episode(std::uint64_t) override {
        hour_ = 0;
        spent_today_ = 0;
    }

    long long act(const AttackerObservation& obs) override {
        const long long s = encode(obs, data_->grid);
        long long chosen;
        if (!bound_) {
            chosen = data_->actions[static_cast<std::size_t>(data_->table.greedy_action(s))];
        } else {
            if (hour_ % bound_->day_length == 0) spent_today_ = 0;
            const long long allowance = bound_->per_day_limit - spent_today_;
            std::vector<long long> allowed;
            for (long long i = 0; i < static_cast<long long>(data_->actions.size()); ++i)
                if (data_->actions[static_cast<std::size_t>(i)] <= allowance)
                    allowed.push_back(i);
            if (allowed.empty()) allowed.push_back(0);
            const long long idx = data_->table.greedy_action_among(s, allowed);
            chosen = data_->actions[static_cast<std::size_t>(idx)];
            spent_today_ += chosen;
        }
        ++hour_;
        return chosen;
    }

    PolicyManifest manifest() const override {
        PolicyManifest m{"trained_attacker",
                         {{"config_hash", std::to_string(data_->config_hash_value)},
                          {"seed", std::to_string(data_->seed)},
                          {"episodes", std::to_string(data_->hyper.episodes)}},
                         {}};
        if (bound_) {
            m.params.emplace_back("per_day_limit", std::to_string(bound_->per_day_limit));
            m.params.emplace_back("day_length", std::to_string(bound_->day_length));
        }
        return m;
    }
    std::unique_ptr<AttackerPolicy> clone() const override {
        return std::make_unique<TrainedAttackerPolicy>(*this);
    }

    const TrainedPolicyData& data() const { return *data_; }
    std::optional<DailyBound> daily_bound() const { return bound_; }

private:
    std::shared_ptr<const TrainedPolicyData> data_;
    std::optional<DailyBound> bound_;
    int hour_ = 0;
    long long spent_today_ = 0;
};

// ---------------------------------------------------------------------------
// Training
// ---------------------------------------------------------------------------

namespace train_stream {
inline constexpr std::uint64_t kEnv = 10;
inline constexpr std::uint64_t kExplore = 11;
inline constexpr std::uint64_t kOpponentPick = 12;
inline constexpr std::uint64_t kOpponentPlay = 13;
} // namespace train_stream

struct OpponentMix {
    std::vector<std::pair<std::shared_ptr<AttackerPolicy>, double>> entries;

    void validate() const {
        if (entries.empty()) throw std::invalid_argument("opponent mix: empty");
        double total = 0.0;
        for (const auto& [policy, weight] : entries) {
            if (!policy) throw std::invalid_argument("opponent mix: null policy");
            if (weight < 0.0) throw std::invalid_argument("opponent mix: negative weight");
            total += weight;
        }
        if (std::abs(total - 1.0) > 1e-9)
            throw std::invalid_argument("opponent mix: weights must sum to 1");
    }

    AttackerPolicy& pick(double u) const {
        for (const auto& [policy, weight] : entries) {
            if (u < weight) return *policy;
            u -= weight;
        }
        return *entries.back().first;
    }
};

// Epsilon-greedy Q-learning for the defender against a mixture of attacker
// policies. Each episode samples one opponent. The defender only ever sees
// its own observation, so nothing about y or a leaks into the table.
// Passing warm_start continues training from an existing table (visit counts
// carry over), which is how retraining folds new attacker episodes into an
// already-trained defender.
inline TrainedDefenderPolicy train_defender(const GameConfig& cfg, const OpponentMix& mix,
                                            const Hyperparams& hyper, const Aggregation& agg,
                                            std::uint64_t seed,
                                            const TrainedPolicyData* warm_start = nullptr) {
    cfg.validate();
    hyper.validate();
    mix.validate();

    auto data = std::make_shared<TrainedPolicyData>();
    data->grid = StateGrid::defender(cfg, agg);
    data->actions = legal_actions_defender(cfg);
    data->table = QTable(data->grid.size(), static_cast<long long>(data->actions.size()));
    data->config_hash_value = config_hash(cfg);
    data->seed = seed;
    data->hyper = hyper;
    data->player = Player::Defender;
    if (warm_start) {
        if (warm_start->player != Player::Defender ||
            warm_start->table.n_states() != data->table.n_states() ||
            warm_start->table.n_actions() != data->table.n_actions() ||
            warm_start->actions != data->actions)
            throw std::invalid_argument(
                "train_defender: warm start is incompatible with this grid or action set");
        data->table = warm_start->table;
    }

    const long long n_actions = static_cast<long long>(data->actions.size());
    for (long long ep = 0; ep < hyper.episodes; ++ep) {
        const double eps = hyper.epsilon_at(ep);
        Rng env_rng(derive_seed(seed, train_stream::kEnv, static_cast<std::uint64_t>(ep)));
        Rng explore_rng(
            derive_seed(seed, train_stream::kExplore, static_cast<std::uint64_t>(ep)));
        Rng pick_rng(
            derive_seed(seed, train_stream::kOpponentPick, static_cast<std::uint64_t>(ep)));
        AttackerPolicy& opponent = mix.pick(pick_rng.uniform01());
        opponent.begin_episode(
            derive_seed(seed, train_stream::kOpponentPlay, static_cast<std::uint64_t>(ep)));

        GameState state = initial_state(cfg);
        long long last_d = 0;
        long long last_a = 0;
        while (!state.terminal()) {
            const DefenderObservation obs = make_defender_observation(state, last_d);
            const long long s_idx = encode(obs, data->grid);
            long long a_idx;
            if (explore_rng.uniform01() < eps) {
                a_idx = static_cast<long long>(
                    explore_rng.uniform_below(static_cast<std::uint64_t>(n_actions)));
            } else {
                a_idx = data->table.greedy_action(s_idx);
            }
            const long long d = data->actions[static_cast<std::size_t>(a_idx)];
            const long long a =
                opponent.act(make_attacker_observation(state, last_d, last_a));

            const double reward = shaped_reward_defender(cfg, state, d);
            const StepResult r = step(cfg, state, d, a, env_rng);
            const long long s_next = encode(r.defender_obs, data->grid);
            data->table.update(s_idx, a_idx, reward, s_next, r.next.terminal(), hyper);

            state = r.next;
            last_d = d;
            last_a = a;
        }
    }
    return TrainedDefenderPolicy(std::move(data));
}

// Best-response training for the attacker against a frozen defender. The
// attacker sees the full state. An optional daily bound constrains action
// selection during training and play alike.
inline TrainedAttackerPolicy train_attacker_best_response(
    const GameConfig& cfg, const DefenderPolicy& frozen_defender, const Hyperparams& hyper,
    const Aggregation& agg, std::uint64_t seed,
    std::optional<DailyBound> bound = std::nullopt) {
    cfg.validate();
    hyper.validate();
    if (bound) bound->validate();

    auto data = std::make_shared<TrainedPolicyData>();
    data->grid = StateGrid::attacker(cfg, agg);
    data->actions = legal_actions_attacker(cfg);
    data->table = QTable(data->grid.size(), static_cast<long long>(data->actions.size()));
    data->config_hash_value = config_hash(cfg);
    data->seed = seed;
    data->hyper = hyper;
    data->player = Player::Attacker;

    const long long n_actions = static_cast<long long>(data->actions.size());
    std::unique_ptr<DefenderPolicy> defender = frozen_defender.clone();

    for (long long ep = 0; ep < hyper.episodes; ++ep) {
        const double eps = hyper.epsilon_at(ep);
        Rng env_rng(derive_seed(seed, train_stream::kEnv, static_cast<std::uint64_t>(ep)));
        Rng explore_rng(
            derive_seed(seed, train_stream::kExplore, static_cast<std::uint64_t>(ep)));
        defender->begin_episode(
            derive_seed(seed, train_stream::kOpponentPlay, static_cast<std::uint64_t>(ep)));

        GameState state = initial_state(cfg);
        long long last_d = 0;
        long long last_a = 0;
        int hour = 0;
        long long spent_today = 0;
        while (!state.terminal()) {
            const AttackerObservation obs = make_attacker_observation(state, last_d, last_a);
            const long long s_idx = encode(obs, data->grid);

            std::vector<long long> allowed;
            if (bound) {
                if (hour % bound->day_length == 0) spent_today = 0;
                const long long allowance = bound->per_day_limit - spent_today;
                for (long long i = 0; i < n_actions; ++i)
                    if (data->actions[static_cast<std::size_t>(i)] <= allowance)
                        allowed.push_back(i);
                if (allowed.empty()) allowed.push_back(0);
            }

            long long a_idx;
            if (bound) {
                if (explore_rng.uniform01() < eps) {
                    a_idx = allowed[explore_rng.uniform_below(allowed.size())];
                } else {
                    a_idx = data->table.greedy_action_among(s_idx, allowed);
                }
            } else if (explore_rng.uniform01() < eps) {
                a_idx = static_cast<long long>(
                    explore_rng.uniform_below(static_cast<std::uint64_t>(n_actions)));
            } else {
                a_idx = data->table.greedy_action(s_idx);
            }

            const long long a = data->actions[static_cast<std::size_t>(a_idx)];
            const long long d = defender->act(make_defender_observation(state, last_d));

            const double reward = shaped_reward_attacker(cfg, state, d, a);
            const StepResult r = step(cfg, state, d, a, env_rng);
            const long long s_next = encode(r.attacker_obs, data->grid);
            data->table.update(s_idx, a_idx, reward, s_next, r.next.terminal(), hyper);

            if (bound) spent_today += a;
            ++hour;
            state = r.next;
            last_d = d;
            last_a = a;
        }
    }
    return TrainedAttackerPolicy(std::move(data), bound);
}

// ---------------------------------------------------------------------------
// Persistence: versioned binary with a provenance header
// ---------------------------------------------------------------------------

namespace detail {

inline constexpr char kQTableMagic[8] = {'C', 'S', 'O', 'C', 'Q', 'T', 'B', 'L'};
inline constexpr std::uint32_t kQTableVersion = 1;

template <typename T>
void write_pod(std::ostream& out, const T& value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
void read_pod(std::istream& in, T& value) {
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!in) throw std::runtime_error("qtable load: truncated file");
}

} // namespace detail

inline void save_trained_policy(const std::string& path, const TrainedPolicyData& data) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("qtable save: cannot open " + path);
    out.write(detail::kQTableMagic, sizeof(detail::kQTableMagic));
    detail::write_pod(out, detail::kQTableVersion);
    detail::write_pod(out, data.config_hash_value);
    detail::write_pod(out, static_cast<std::uint8_t>(data.player));
    detail::write_pod(out, data.grid.agg.backlog_bin);
    detail::write_pod(out, data.grid.agg.backlog_cap);
    detail::write_pod(out, data.grid.agg.budget_bin);
    detail::write_pod(out, data.grid.agg.hours_bin);
    detail::write_pod(out, data.grid.n_backlog);
    detail::write_pod(out, data.grid.n_hours);
    detail::write_pod(out, data.grid.n_defender);
    detail::write_pod(out, data.grid.n_attacker);
    detail::write_pod(out, data.hyper.episodes);
    detail::write_pod(out, data.hyper.epsilon_start);
    detail::write_pod(out, data.hyper.epsilon_end);
    detail::write_pod(out, data.hyper.gamma);
    detail::write_pod(out, data.hyper.lr_scale);
    detail::write_pod(out, data.hyper.lr_exponent);
    detail::write_pod(out, data.seed);
    const std::uint64_t n_actions = data.actions.size();
    detail::write_pod(out, n_actions);
    for (long long a : data.actions) detail::write_pod(out, a);
    const std::uint64_t n_states = static_cast<std::uint64_t>(data.table.n_states());
    const std::uint64_t n_table_actions = static_cast<std::uint64_t>(data.table.n_actions());
    detail::write_pod(out, n_states);
    detail::write_pod(out, n_table_actions);
    out.write(reinterpret_cast<const char*>(data.table.raw_values().data()),
              static_cast<std::streamsize>(data.table.raw_values().size() * sizeof(double)));
    out.write(reinterpret_cast<const char*>(data.table.raw_visits().data()),
              static_cast<std::streamsize>(data.table.raw_visits().size() *
                                           sizeof(std::uint32_t)));
    if (!out) throw std::runtime_error("qtable save: write failed for " + path);
}

// Loads a persisted policy; refuses to load when the stored config hash does
// not match the config it is about to be used with.
inline std::shared_ptr<TrainedPolicyData> load_trained_policy(
    const std::string& path, std::uint64_t expected_config_hash) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("qtable load: cannot open " + path);
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, detail::kQTableMagic, sizeof(magic)) != 0)
        throw std::runtime_error("qtable load: bad magic in " + path);
    std::uint32_t version = 0;
    detail::read_pod(in, version);
    if (version != detail::kQTableVersion)
        throw std::runtime_error("qtable load: unsupported version in " + path);

    auto data = std::make_shared<TrainedPolicyData>();
    detail::read_pod(in, data->config_hash_value);
    if (data->config_hash_value != expected_config_hash) {
        std::ostringstream oss;
        oss << "qtable load: config hash mismatch for " << path << " (stored "
            << data->config_hash_value << ", expected " << expected_config_hash << ")";
        throw std::runtime_error(oss.str());
    }
    std::uint8_t player = 0;
    detail::read_pod(in, player);
    data->player = static_cast<Player>(player);
    detail::read_pod(in, data->grid.agg.backlog_bin);
    detail::read_pod(in, data->grid.agg.backlog_cap);
    detail::read_pod(in, data->grid.agg.budget_bin);
    detail::read_pod(in, data->grid.agg.hours_bin);
    detail::read_pod(in, data->grid.n_backlog);
    detail::read_pod(in, data->grid.n_hours);
    detail::read_pod(in, data->grid.n_defender);
    detail::read_pod(in, data->grid.n_attacker);
    detail::read_pod(in, data->hyper.episodes);
    detail::read_pod(in, data->hyper.epsilon_start);
    detail::read_pod(in, data->hyper.epsilon_end);
    detail::read_pod(in, data->hyper.gamma);
    detail::read_pod(in, data->hyper.lr_scale);
    detail::read_pod(in, data->hyper.lr_exponent);
    detail::read_pod(in, data->seed);
    std::uint64_t n_actions = 0;
    detail::read_pod(in, n_actions);
    data->actions.resize(n_actions);
    for (auto& a : data->actions) detail::read_pod(in, a);
    std::uint64_t n_states = 0;
    std::uint64_t n_table_actions = 0;
    detail::read_pod(in, n_states);
    detail::read_pod(in, n_table_actions);
    if (n_table_actions != n_actions)
        throw std::runtime_error("qtable load: inconsistent action counts in " + path);
    data->table = QTable(static_cast<long long>(n_states),
                         static_cast<long long>(n_table_actions));
    in.read(reinterpret_cast<char*>(data->table.raw_values().data()),
            static_cast<std::streamsize>(data->table.raw_values().size() * sizeof(double)));
    in.read(reinterpret_cast<char*>(data->table.raw_visits().data()),
            static_cast<std::streamsize>(data->table.raw_visits().size() *
                                         sizeof(std::uint32_t)));
    if (!in) throw std::runtime_error("qtable load: truncated table in " + path);
    return data;
}

} // namespace csoc
