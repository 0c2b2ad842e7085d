#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "csoc/game.hpp"
#include "csoc/metrics.hpp"
#include "csoc/policies.hpp"
#include "csoc/rl.hpp"
#include "csoc/rng.hpp"

namespace csoc {

struct MatchupStats {
    double mean_sup_cost = 0.0;
    std::array<double, 4> proportions{};
    long long worst_run_max_backlog = 0;
    int runs = 0;
    std::uint64_t seed = 0;

    std::string to_string() const {
        std::ostringstream oss;
        oss.precision(6);
        oss << "sup=" << mean_sup_cost << " bands=[" << proportions[0] << ","
            << proportions[1] << "," << proportions[2] << "," << proportions[3]
            << "] worst_max=" << worst_run_max_backlog << " runs=" << runs;
        return oss.str();
    }
};

struct RunSummary {
    double sup_cost = 0.0;
    long long max_backlog = 0;
    std::array<long long, 4> band_hours{};
    long long defender_spend = 0;
    long long injected = 0;
};

struct EvalOutcome {
    MatchupStats stats;
    std::vector<RunSummary> per_run;
    std::size_t worst_run_index = 0;

    // Mean over runs of the per-run fraction of hours in the band.
    double mean_band_fraction(Band band) const {
        if (per_run.empty()) return 0.0;
        double total = 0.0;
        for (const auto& r : per_run) {
            long long hours = 0;
            for (long long h : r.band_hours) hours += h;
            total += static_cast<double>(r.band_hours[static_cast<std::size_t>(band)]) /
                     static_cast<double>(hours);
        }
        return total / static_cast<double>(per_run.size());
    }
};

namespace detail {

inline RunSummary summarize_run(const RunTrace& trace, const BandBoundaries& bb) {
    RunSummary s;
    s.sup_cost = trace.sup_cost;
    s.max_backlog = trace.max_backlog;
    for (const auto& h : trace.hours)
        s.band_hours[static_cast<std::size_t>(backlog_band(h.backlog_post, bb))]++;
    s.defender_spend = trace.total_defender_spend();
    s.injected = trace.total_injected();
    return s;
}

// Index-sharded parallel map; results land in per-run slots, so aggregation
// is independent of the thread count.
template <typename Fn>
void parallel_runs(int runs, int jobs, Fn&& fn) {
    jobs = std::max(1, std::min(jobs, runs));
    if (jobs == 1) {
        for (int r = 0; r < runs; ++r) fn(r);
        return;
    }
    std::vector<std::thread> workers;
    workers.reserve(static_cast<std::size_t>(jobs));
    for (int w = 0; w < jobs; ++w) {
        workers.emplace_back([&fn, w, jobs, runs]() {
            for (int r = w; r < runs; r += jobs) fn(r);
        });
    }
    for (auto& t : workers) t.join();
}

} // namespace detail

// Monte-Carlo evaluation of one defender/attacker pairing. Each run gets a
// seed derived from (seed, run index); policies are cloned per worker, so the
// result does not depend on the number of jobs.
inline EvalOutcome evaluate_matchup_full(const DefenderPolicy& defender,
                                         const AttackerPolicy& attacker,
                                         const GameConfig& cfg, int runs, std::uint64_t seed,
                                         int jobs = 1) {
    if (runs < 1) throw std::invalid_argument("evaluate_matchup: runs must be >= 1");
    cfg.validate();
    const BandBoundaries bb = BandBoundaries::from_config(cfg);

    EvalOutcome outcome;
    outcome.per_run.resize(static_cast<std::size_t>(runs));

    if (jobs <= 1) {
        std::unique_ptr<DefenderPolicy> def = defender.clone();
        std::unique_ptr<AttackerPolicy> atk = attacker.clone();
        for (int r = 0; r < runs; ++r) {
            const RunTrace trace =
                episode(*def, *atk, cfg, derive_seed(seed, static_cast<std::uint64_t>(r)));
            outcome.per_run[static_cast<std::size_t>(r)] = detail::summarize_run(trace, bb);
        }
    } else {
        detail::parallel_runs(runs, jobs, [&](int r) {
            thread_local std::unique_ptr<DefenderPolicy> def;
            thread_local std::unique_ptr<AttackerPolicy> atk;
            thread_local const void* def_src = nullptr;
            thread_local const void* atk_src = nullptr;
            if (def_src != &defender) {
                def = defender.clone();
                def_src = &defender;
            }
            if (atk_src != &attacker) {
                atk = attacker.clone();
                atk_src = &attacker;
            }
            const RunTrace trace =
                episode(*def, *atk, cfg, derive_seed(seed, static_cast<std::uint64_t>(r)));
            outcome.per_run[static_cast<std::size_t>(r)] = detail::summarize_run(trace, bb);
        });
    }

    MatchupStats& stats = outcome.stats;
    stats.runs = runs;
    stats.seed = seed;
    std::array<long long, 4> band_totals{};
    long long hour_total = 0;
    long long worst_backlog = -1;
    for (std::size_t r = 0; r < outcome.per_run.size(); ++r) {
        const RunSummary& s = outcome.per_run[r];
        stats.mean_sup_cost += s.sup_cost;
        for (std::size_t band = 0; band < 4; ++band) {
            band_totals[band] += s.band_hours[band];
            hour_total += s.band_hours[band];
        }
        if (s.max_backlog > worst_backlog) {
            worst_backlog = s.max_backlog;
            outcome.worst_run_index = r;
        }
    }
    stats.mean_sup_cost /= static_cast<double>(runs);
    for (std::size_t band = 0; band < 4; ++band)
        stats.proportions[band] =
            static_cast<double>(band_totals[band]) / static_cast<double>(hour_total);
    stats.worst_run_max_backlog = worst_backlog;
    return outcome;
}

inline MatchupStats evaluate_matchup(const DefenderPolicy& defender,
                                     const AttackerPolicy& attacker, const GameConfig& cfg,
                                     int runs, std::uint64_t seed, int jobs = 1) {
    return evaluate_matchup_full(defender, attacker, cfg, runs, seed, jobs).stats;
}

// ---------------------------------------------------------------------------
// Best-response and defender-training strategies
// ---------------------------------------------------------------------------

// The opponents every defender trains against before any best responses are
// discovered: the stochastic baseline, a cap-or-nothing trickle, and dumps at
// several start hours so late-game bursts appear in the training data.
inline std::vector<std::shared_ptr<AttackerPolicy>> standard_training_pool(
    const GameConfig& cfg) {
    const double neutral = static_cast<double>(cfg.attacker_budget) /
                           static_cast<double>(cfg.horizon_hours);
    std::vector<std::shared_ptr<AttackerPolicy>> pool;
    pool.push_back(std::make_shared<StochasticRateAttacker>(
        std::vector<std::pair<double, double>>{
            {0.0, 0.4}, {neutral, 0.3}, {2.4 * neutral, 0.2}, {4.8 * neutral, 0.1}},
        cfg.attacker_chunk, cfg.per_hour_cap));
    pool.push_back(std::make_shared<StochasticRateAttacker>(
        std::vector<std::pair<double, double>>{{0.0, 0.5},
                                               {static_cast<double>(cfg.per_hour_cap), 0.5}},
        cfg.attacker_chunk, cfg.per_hour_cap));
    const int dump_starts[] = {0, cfg.horizon_hours * 3 / 8, cfg.horizon_hours * 3 / 4};
    for (int start : dump_starts)
        pool.push_back(std::make_shared<DumpAttacker>(cfg.per_hour_cap, start));
    return pool;
}

struct BestResponseOptions {
    Hyperparams hyper;        // defaults: 30k episodes, gamma 0.99
    Aggregation aggregation;
    int candidates = 8;       // independently seeded trainings; keep the strongest
    int eval_runs = 200;
    std::optional<DailyBound> bound;
    bool select_by_red_band = false; // rank candidates by red-band share instead of sup
    int jobs = 1;
};

// Approximate best response: the single-run Q-learner lands in different
// local optima per seed, so train several and keep the strongest attack.
inline TrainedAttackerPolicy best_response_attack(const GameConfig& cfg,
                                                  const DefenderPolicy& defender,
                                                  const BestResponseOptions& opts,
                                                  std::uint64_t seed) {
    if (opts.candidates < 1)
        throw std::invalid_argument("best_response_attack: candidates must be >= 1");
    std::unique_ptr<TrainedAttackerPolicy> best;
    double best_score = -1.0;
    for (int c = 0; c < opts.candidates; ++c) {
        TrainedAttackerPolicy candidate = train_attacker_best_response(
            cfg, defender, opts.hyper, opts.aggregation, derive_seed(seed, 50, c),
            opts.bound);
        const MatchupStats stats = evaluate_matchup(defender, candidate, cfg, opts.eval_runs,
                                                    derive_seed(seed, 51, c), opts.jobs);
        const double score =
            opts.select_by_red_band ? stats.proportions[3] : stats.mean_sup_cost;
        if (score > best_score) {
            best_score = score;
            best = std::make_unique<TrainedAttackerPolicy>(std::move(candidate));
        }
    }
    return std::move(*best);
}

struct DefenderTrainOptions {
    Hyperparams defender_hyper;   // defaults below are overwritten by callers
    Hyperparams validation_hyper; // best responses used to score candidates
    Aggregation defender_agg;
    Aggregation attacker_agg;
    int candidates = 3;
    int eval_runs = 200;
    double warm_start_epsilon = 0.3; // exploration restart when continuing a table
    int jobs = 1;
};

struct ValidatedDefender {
    std::shared_ptr<TrainedDefenderPolicy> policy;
    double validation_sup = 0.0; // worst sup over validation attacks
};

// Train several candidate tables on the pool mixture and keep the one whose
// worst case over (freshly trained validation best responses at the given
// chunks) and (the pool itself) is smallest.
inline ValidatedDefender robust_train_defender(
    const GameConfig& cfg, const std::vector<std::shared_ptr<AttackerPolicy>>& pool,
    const DefenderTrainOptions& opts, std::uint64_t seed,
    const TrainedPolicyData* warm_start = nullptr,
    std::vector<long long> validation_chunks = {}) {
    if (pool.empty()) throw std::invalid_argument("robust_train_defender: empty pool");
    if (validation_chunks.empty()) validation_chunks = {cfg.attacker_chunk};
    OpponentMix mix;
    for (const auto& p : pool) mix.entries.emplace_back(p, 1.0 / static_cast<double>(pool.size()));
    Hyperparams hyper = opts.defender_hyper;
    if (warm_start) hyper.epsilon_start = opts.warm_start_epsilon;

    ValidatedDefender best;
    best.validation_sup = std::numeric_limits<double>::infinity();
    for (int c = 0; c < opts.candidates; ++c) {
        auto candidate = std::make_shared<TrainedDefenderPolicy>(train_defender(
            cfg, mix, hyper, opts.defender_agg, derive_seed(seed, 10, c), warm_start));
        double worst = 0.0;
        for (std::size_t vi = 0; vi < validation_chunks.size(); ++vi) {
            GameConfig probe_cfg = cfg;
            probe_cfg.attacker_chunk = validation_chunks[vi];
            TrainedAttackerPolicy probe = train_attacker_best_response(
                probe_cfg, *candidate, opts.validation_hyper, opts.attacker_agg,
                derive_seed(seed, 11 + 100 * vi, c));
            worst = std::max(worst, evaluate_matchup(*candidate, probe, probe_cfg,
                                                     opts.eval_runs,
                                                     derive_seed(seed, 12 + 100 * vi, c),
                                                     opts.jobs)
                                        .mean_sup_cost);
        }
        for (std::size_t pi = 0; pi < pool.size(); ++pi) {
            worst = std::max(worst, evaluate_matchup(*candidate, *pool[pi], cfg,
                                                     opts.eval_runs,
                                                     derive_seed(seed, 30 + pi, c), opts.jobs)
                                        .mean_sup_cost);
        }
        if (worst < best.validation_sup) {
            best.validation_sup = worst;
            best.policy = candidate;
        }
    }
    return best;
}

struct HardenOptions {
    DefenderTrainOptions train;
    BestResponseOptions discovery; // best responses added to the pool
    double target_validation_sup = 0.35;
    int max_iterations = 4;
};

// Iterated robustification against same-chunk best responses: discover an
// attack, fold it into the pool, continue training the same table. Stops as
// soon as the defender validates below the target.
inline ValidatedDefender harden_defender(const GameConfig& cfg,
                                         std::vector<std::shared_ptr<AttackerPolicy>> pool,
                                         const HardenOptions& opts, std::uint64_t seed) {
    ValidatedDefender current =
        robust_train_defender(cfg, pool, opts.train, derive_seed(seed, 1));
    ValidatedDefender best = current;
    for (int it = 1;
         it <= opts.max_iterations && best.validation_sup > opts.target_validation_sup;
         ++it) {
        pool.push_back(std::make_shared<TrainedAttackerPolicy>(best_response_attack(
            cfg, *current.policy, opts.discovery, derive_seed(seed, 2, it))));
        ValidatedDefender next =
            robust_train_defender(cfg, pool, opts.train, derive_seed(seed, 3, it),
                                  &current.policy->data());
        if (next.validation_sup <= current.validation_sup) current = next;
        if (current.validation_sup < best.validation_sup) best = current;
    }
    return best;
}

// ---------------------------------------------------------------------------
// Double oracle loop
// ---------------------------------------------------------------------------

struct PolicyPool {
    std::vector<std::shared_ptr<AttackerPolicy>> attackers;
    std::vector<std::shared_ptr<DefenderPolicy>> defenders;
    // matchup[d][a] for defender d against attacker a
    std::vector<std::vector<MatchupStats>> matchups;
};

struct DoubleOracleIteration {
    int iteration = 0;
    PolicyManifest attacker_manifest;
    double best_response_sup = 0.0;   // new attacker vs the current defender
    double pool_best_sup = 0.0;       // strongest pool attacker vs the same defender
    double retrained_sup = 0.0;       // new attacker vs the retrained defender
    std::array<double, 4> proportions{};
    std::uint64_t seed = 0;
    bool accepted = false;

    std::string to_string() const {
        std::ostringstream oss;
        oss.precision(6);
        oss << "iteration=" << iteration << " attacker=" << attacker_manifest.to_string()
            << " pre_sup=" << best_response_sup << " pool_sup=" << pool_best_sup
            << " post_sup=" << retrained_sup << " bands=[" << proportions[0] << ","
            << proportions[1] << "," << proportions[2] << "," << proportions[3] << "]"
            << " seed=" << seed << " accepted=" << (accepted ? 1 : 0);
        return oss.str();
    }
};

struct DoubleOracleSettings {
    int max_iterations = 4;
    double improvement_threshold = 0.05;
    int eval_runs = 200;
    Hyperparams defender_hyper;
    Hyperparams attacker_hyper;
    Aggregation aggregation;
    std::optional<Aggregation> attacker_aggregation; // defaults to `aggregation`
    std::optional<DailyBound> attacker_bound; // applied to trained best responses
    int br_candidates = 1;      // independently seeded best responses per iteration
    int retrain_candidates = 1; // retraining attempts per iteration
    bool warm_start_retrain = true;
    int jobs = 1;
};

struct DoubleOracleResult {
    std::shared_ptr<DefenderPolicy> final_defender;
    PolicyPool pool;
    std::vector<DoubleOracleIteration> log;
};

namespace do_stream {
inline constexpr std::uint64_t kBestResponse = 100;
inline constexpr std::uint64_t kEvalNew = 101;
inline constexpr std::uint64_t kEvalPool = 102;
inline constexpr std::uint64_t kRetrain = 103;
inline constexpr std::uint64_t kEvalPost = 104;
} // namespace do_stream

// Alternate best-response discovery and defender retraining on the grown
// pool. Stops when the newest best response fails to beat the strongest pool
// attacker by the improvement threshold.
inline DoubleOracleResult run_double_oracle(
    const GameConfig& cfg, std::shared_ptr<DefenderPolicy> initial_defender,
    std::vector<std::shared_ptr<AttackerPolicy>> initial_attackers,
    const DoubleOracleSettings& settings, std::uint64_t seed) {
    cfg.validate();
    if (settings.max_iterations < 1)
        throw std::invalid_argument("double oracle: iterations must be >= 1");
    if (initial_attackers.empty())
        throw std::invalid_argument("double oracle: need at least one initial attacker");
    if (!initial_defender) throw std::invalid_argument("double oracle: null defender");

    DoubleOracleResult result;
    result.pool.attackers = std::move(initial_attackers);
    result.pool.defenders.push_back(initial_defender);
    std::shared_ptr<DefenderPolicy> defender = initial_defender;

    BestResponseOptions br_opts;
    br_opts.hyper = settings.attacker_hyper;
    br_opts.aggregation = settings.attacker_aggregation.value_or(settings.aggregation);
    br_opts.candidates = settings.br_candidates;
    br_opts.eval_runs = settings.eval_runs;
    br_opts.bound = settings.attacker_bound;
    br_opts.jobs = settings.jobs;

    DefenderTrainOptions retrain_opts;
    retrain_opts.defender_hyper = settings.defender_hyper;
    retrain_opts.validation_hyper = settings.attacker_hyper;
    retrain_opts.defender_agg = settings.aggregation;
    retrain_opts.attacker_agg = br_opts.aggregation;
    retrain_opts.candidates = settings.retrain_candidates;
    retrain_opts.eval_runs = settings.eval_runs;
    retrain_opts.jobs = settings.jobs;

    for (int iter = 1; iter <= settings.max_iterations; ++iter) {
        const std::uint64_t iter_seed = derive_seed(seed, static_cast<std::uint64_t>(iter));
        TrainedAttackerPolicy br = best_response_attack(
            cfg, *defender, br_opts, derive_seed(iter_seed, do_stream::kBestResponse));

        const std::uint64_t eval_seed = derive_seed(iter_seed, do_stream::kEvalNew);
        const MatchupStats br_stats =
            evaluate_matchup(*defender, br, cfg, settings.eval_runs, eval_seed, settings.jobs);

        double pool_best = -std::numeric_limits<double>::infinity();
        for (const auto& attacker : result.pool.attackers) {
            const MatchupStats s =
                evaluate_matchup(*defender, *attacker, cfg, settings.eval_runs, eval_seed,
                                 settings.jobs);
            pool_best = std::max(pool_best, s.mean_sup_cost);
        }

        DoubleOracleIteration entry;
        entry.iteration = iter;
        entry.attacker_manifest = br.manifest();
        entry.best_response_sup = br_stats.mean_sup_cost;
        entry.pool_best_sup = pool_best;
        entry.proportions = br_stats.proportions;
        entry.seed = iter_seed;

        if (br_stats.mean_sup_cost - pool_best < settings.improvement_threshold) {
            entry.retrained_sup = br_stats.mean_sup_cost;
            result.log.push_back(entry);
            break; // no harmful new attacker found
        }

        entry.accepted = true;
        result.pool.attackers.push_back(
            std::make_shared<TrainedAttackerPolicy>(std::move(br)));

        const auto* warm = dynamic_cast<const TrainedDefenderPolicy*>(defender.get());
        defender = robust_train_defender(cfg, result.pool.attackers, retrain_opts,
                                         derive_seed(iter_seed, do_stream::kRetrain),
                                         warm && settings.warm_start_retrain ? &warm->data()
                                                                             : nullptr)
                       .policy;
        result.pool.defenders.push_back(defender);

        entry.retrained_sup =
            evaluate_matchup(*defender, *result.pool.attackers.back(), cfg,
                             settings.eval_runs,
                             derive_seed(iter_seed, do_stream::kEvalPost), settings.jobs)
                .mean_sup_cost;
        result.log.push_back(entry);
    }

    // final matchup matrix over the grown pool
    result.pool.matchups.resize(result.pool.defenders.size());
    for (std::size_t di = 0; di < result.pool.defenders.size(); ++di) {
        result.pool.matchups[di].resize(result.pool.attackers.size());
        for (std::size_t ai = 0; ai < result.pool.attackers.size(); ++ai) {
            result.pool.matchups[di][ai] = evaluate_matchup(
                *result.pool.defenders[di], *result.pool.attackers[ai], cfg,
                settings.eval_runs,
                derive_seed(seed, do_stream::kEvalPool, di * 1000 + ai), settings.jobs);
        }
    }

    result.final_defender = defender;
    return result;
}

// Train and evaluate one best response per attacker chunk size against a
// frozen defender.
struct ChunkSweepEntry {
    long long chunk = 0;
    MatchupStats stats;
    std::shared_ptr<TrainedAttackerPolicy> attacker;
};

inline std::vector<ChunkSweepEntry> chunk_sweep_attack(
    const DefenderPolicy& defender, const GameConfig& cfg,
    const std::vector<long long>& chunk_sizes, const BestResponseOptions& opts,
    std::uint64_t seed) {
    std::vector<ChunkSweepEntry> entries;
    for (std::size_t i = 0; i < chunk_sizes.size(); ++i) {
        const long long chunk = chunk_sizes[i];
        if (chunk < 1 || chunk > cfg.per_hour_cap || cfg.per_hour_cap % chunk != 0)
            throw std::invalid_argument("chunk sweep: chunk must divide the per-hour cap");
        GameConfig variant = cfg;
        variant.attacker_chunk = chunk;
        ChunkSweepEntry entry;
        entry.chunk = chunk;
        entry.attacker = std::make_shared<TrainedAttackerPolicy>(
            best_response_attack(variant, defender, opts, derive_seed(seed, 200, i)));
        entry.stats = evaluate_matchup(defender, *entry.attacker, variant, opts.eval_runs,
                                       derive_seed(seed, 201, i), opts.jobs);
        entries.push_back(std::move(entry));
    }
    return entries;
}

} // namespace csoc
