#pragma once

#include <algorithm>
#include <array>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "csoc/bounds.hpp"
#include "csoc/config_io.hpp"
#include "csoc/csv.hpp"
#include "csoc/double_oracle.hpp"
#include "csoc/game.hpp"
#include "csoc/metrics.hpp"
#include "csoc/policies.hpp"
#include "csoc/rl.hpp"
#include "csoc/svg.hpp"

namespace csoc {

inline constexpr const char* kVersion = "0.1.0";

// Exit codes surfaced by the CLI.
enum class RecipeErrorKind : int {
    Config = 2,          // invalid configuration or recipe arguments
    MissingArtifact = 3, // referenced files absent or provenance mismatch
    Numerical = 4,       // training diverged or produced non-finite values
};

class RecipeError : public std::runtime_error {
public:
    RecipeError(RecipeErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}
    RecipeErrorKind kind() const { return kind_; }
    int exit_code() const { return static_cast<int>(kind_); }

private:
    RecipeErrorKind kind_;
};

struct RecipeOptions {
    std::string out_dir = "out";
    std::uint64_t seed = 12345;
    int runs = 500;
    int jobs = 1;
    std::string scale = "desk"; // desk | paper
    std::optional<std::string> config_file;
};

struct ExperimentRecipe {
    std::string name;
    std::string description;
    bool needs_training = false; // training-dependent recipes are desk-scale only
};

inline const std::vector<ExperimentRecipe>& recipe_catalog() {
    static const std::vector<ExperimentRecipe> recipes = {
        {"equal-budget-daily-bound",
         "trained defender vs daily-bounded best-response attacker, equal budgets", true},
        {"equal-budget-unbounded",
         "trained defender vs unbounded best-response attacker, equal budgets", true},
        {"ten-percent-extra",
         "trained defender vs daily-bounded best-response attacker with 10% extra budget",
         true},
        {"s1-vs-unbounded",
         "threshold rule S1 vs unbounded best-response attacker, equal budgets", true},
        {"s2-vs-unbounded",
         "aggressive rule S2 vs unbounded best-response attacker, equal budgets", true},
        {"chunk30-attack",
         "defender trained at chunk 60 vs daily-bounded best response at chunk 30", true},
        {"double-oracle-defense",
         "retrain the defender on discovered chunk-30 attacks until none improve", true},
        {"chunk-sweep",
         "best-response attacks at several chunk sizes against the retrained defender", true},
        {"s1-s2-chunk-attack",
         "daily-bounded chunk-30 best responses against the rule policies", true},
        {"theorem1-checks",
         "closed-form bounds, dump-attack arithmetic, busy-cycle and spend-dominance checks",
         false},
    };
    return recipes;
}

inline std::vector<std::string> list_recipes() {
    std::vector<std::string> names;
    for (const auto& r : recipe_catalog()) names.push_back(r.name);
    return names;
}

struct RecipeResult {
    std::string name;
    std::string out_dir;
    std::vector<StatsRow> stats;
    std::vector<std::string> files;
};

namespace recipe_detail {

namespace stream {
inline constexpr std::uint64_t kDefenderTrain = 1;
inline constexpr std::uint64_t kAttackerTrain = 2;
inline constexpr std::uint64_t kEval = 3;
inline constexpr std::uint64_t kDoubleOracle = 4;
inline constexpr std::uint64_t kExtra = 5;
} // namespace stream

struct Context {
    GameConfig cfg;
    TrainSettings train;
    RecipeOptions opts;
    Aggregation defender_agg;
    Aggregation attacker_agg;
    std::filesystem::path dir;
    nlohmann::json manifest;
    std::vector<std::string> files;
};

inline Context make_context(const std::string& recipe_name, const RecipeOptions& opts) {
    Context ctx;
    ctx.opts = opts;
    if (opts.scale == "desk") {
        ctx.cfg = desk_config();
        ctx.defender_agg = Aggregation::desk_defender();
        ctx.attacker_agg = Aggregation::desk_attacker();
    } else if (opts.scale == "paper") {
        ctx.cfg = paper_config();
        ctx.defender_agg = Aggregation::paper_default();
        ctx.attacker_agg = Aggregation::paper_default();
    } else {
        throw RecipeError(RecipeErrorKind::Config,
                          "unknown scale '" + opts.scale + "' (expected desk or paper)");
    }
    if (opts.config_file) {
        if (!std::filesystem::exists(*opts.config_file))
            throw RecipeError(RecipeErrorKind::MissingArtifact,
                              "config file not found: " + *opts.config_file);
        try {
            apply_config_file(ctx.cfg, ctx.train, *opts.config_file);
        } catch (const std::exception& e) {
            throw RecipeError(RecipeErrorKind::Config, e.what());
        }
    }
    if (opts.runs < 1) throw RecipeError(RecipeErrorKind::Config, "runs must be >= 1");
    try {
        ctx.cfg.validate();
    } catch (const std::exception& e) {
        throw RecipeError(RecipeErrorKind::Config, e.what());
    }

    ctx.dir = std::filesystem::path(opts.out_dir);
    std::filesystem::create_directories(ctx.dir);

    ctx.manifest["recipe"] = recipe_name;
    ctx.manifest["version"] = kVersion;
    ctx.manifest["seed"] = opts.seed;
    ctx.manifest["runs"] = opts.runs;
    ctx.manifest["scale"] = opts.scale;
    ctx.manifest["config_hash"] = config_hash(ctx.cfg);
    ctx.manifest["config"] = render_config(ctx.cfg, ctx.train);
    return ctx;
}

inline void write_text(Context& ctx, const std::string& filename, const std::string& body) {
    const std::string path = (ctx.dir / filename).string();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw RecipeError(RecipeErrorKind::Config, "cannot write " + path);
    out << body;
    ctx.files.push_back(filename);
}

inline void finish(Context& ctx, RecipeResult& result) {
    ctx.manifest["files"] = ctx.files;
    const std::string path = (ctx.dir / "manifest.json").string();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw RecipeError(RecipeErrorKind::Config, "cannot write " + path);
    out << ctx.manifest.dump(2) << '\n';
    result.files = ctx.files;
    result.files.push_back("manifest.json");
    result.out_dir = ctx.dir.string();
}

inline std::vector<RunTrace> collect_traces(const DefenderPolicy& defender,
                                            const AttackerPolicy& attacker,
                                            const GameConfig& cfg, int runs,
                                            std::uint64_t seed, int jobs) {
    std::vector<RunTrace> traces(static_cast<std::size_t>(runs));
    detail::parallel_runs(runs, jobs, [&](int r) {
        std::unique_ptr<DefenderPolicy> def = defender.clone();
        std::unique_ptr<AttackerPolicy> atk = attacker.clone();
        traces[static_cast<std::size_t>(r)] =
            episode(*def, *atk, cfg, derive_seed(seed, static_cast<std::uint64_t>(r)));
    });
    return traces;
}

inline StatsRow stats_from_traces(const std::string& label,
                                  const std::vector<RunTrace>& traces,
                                  const BandBoundaries& bb) {
    StatsRow row;
    row.label = label;
    row.runs = static_cast<int>(traces.size());
    double sup = 0.0;
    for (const auto& t : traces) sup += t.sup_cost;
    row.mean_sup_cost = sup / static_cast<double>(traces.size());
    row.proportions = band_proportions(traces, bb);
    row.worst_run_index = worst_run(traces);
    row.worst_run_max_backlog = traces[row.worst_run_index].max_backlog;
    return row;
}

// Evaluate a pairing, then write the trace CSVs and chart pair.
inline StatsRow evaluate_bundle(Context& ctx, const std::string& label,
                                const DefenderPolicy& defender,
                                const AttackerPolicy& attacker, const GameConfig& cfg,
                                std::uint64_t eval_seed, const std::string& prefix = "") {
    const std::vector<RunTrace> traces =
        collect_traces(defender, attacker, cfg, ctx.opts.runs, eval_seed, ctx.opts.jobs);
    const BandBoundaries bb = BandBoundaries::from_config(cfg);
    const StatsRow row = stats_from_traces(label, traces, bb);

    const std::string traces_name = prefix.empty() ? "traces.csv" : prefix + "_traces.csv";
    const std::string worst_name = prefix.empty() ? "worst_run.csv" : prefix + "_worst_run.csv";
    const std::string worst_svg = prefix.empty() ? "worst_run.svg" : prefix + "_worst_run.svg";
    const std::string prop_svg =
        prefix.empty() ? "proportions.svg" : prefix + "_proportions.svg";

    write_traces_csv((ctx.dir / traces_name).string(), traces);
    write_trace_csv((ctx.dir / worst_name).string(), traces[row.worst_run_index]);
    write_worst_run_svg((ctx.dir / worst_svg).string(), traces[row.worst_run_index], bb,
                        label + " (worst of " + std::to_string(ctx.opts.runs) + " runs)");
    write_proportions_svg((ctx.dir / prop_svg).string(), row.proportions,
                          label + " band proportions");
    ctx.files.insert(ctx.files.end(), {traces_name, worst_name, worst_svg, prop_svg});

    nlohmann::json match;
    match["label"] = label;
    match["defender"] = defender.manifest().to_string();
    match["attacker"] = attacker.manifest().to_string();
    match["eval_seed"] = eval_seed;
    match["mean_sup_cost"] = row.mean_sup_cost;
    match["proportions"] = row.proportions;
    match["worst_run"] = row.worst_run_index;
    ctx.manifest["matchups"].push_back(match);
    return row;
}

inline void require_desk(const Context& ctx, const std::string& recipe) {
    if (ctx.opts.scale != "desk")
        throw RecipeError(RecipeErrorKind::Config,
                          "recipe '" + recipe +
                              "' trains tabular policies and only runs at --scale desk");
}

inline DefenderTrainOptions defender_train_options(const Context& ctx) {
    DefenderTrainOptions opts;
    opts.defender_hyper.episodes = ctx.train.defender_episodes;
    opts.defender_hyper.epsilon_end = 0.01;
    opts.validation_hyper.episodes = ctx.train.attacker_episodes;
    opts.defender_agg = ctx.defender_agg;
    opts.attacker_agg = ctx.attacker_agg;
    opts.candidates = ctx.train.defender_candidates;
    opts.jobs = ctx.opts.jobs;
    return opts;
}

inline BestResponseOptions best_response_options(const Context& ctx) {
    BestResponseOptions opts;
    opts.hyper.episodes = ctx.train.attacker_episodes;
    opts.aggregation = ctx.attacker_agg;
    opts.candidates = ctx.train.br_candidates;
    opts.jobs = ctx.opts.jobs;
    return opts;
}

inline HardenOptions harden_options(const Context& ctx) {
    HardenOptions opts;
    opts.train = defender_train_options(ctx);
    opts.discovery = best_response_options(ctx);
    opts.discovery.candidates = std::max(1, ctx.train.br_candidates / 2);
    opts.target_validation_sup = ctx.train.target_validation_sup;
    opts.max_iterations = ctx.train.harden_iterations;
    return opts;
}

inline std::shared_ptr<TrainedPolicyData> load_policy_file(const std::string& path,
                                                           const GameConfig& cfg) {
    if (!std::filesystem::exists(path))
        throw RecipeError(RecipeErrorKind::MissingArtifact, "policy file not found: " + path);
    try {
        return load_trained_policy(path, config_hash(cfg));
    } catch (const std::exception& e) {
        throw RecipeError(RecipeErrorKind::MissingArtifact, e.what());
    }
}

// Trained-defender resolution: load a referenced policy file against the
// exact training config, otherwise run the hardening pipeline and persist it.
inline std::shared_ptr<TrainedDefenderPolicy> resolve_defender(Context& ctx,
                                                               const GameConfig& train_cfg) {
    if (!ctx.train.defender_policy_file.empty())
        return std::make_shared<TrainedDefenderPolicy>(
            load_policy_file(ctx.train.defender_policy_file, train_cfg));
    try {
        const ValidatedDefender trained =
            harden_defender(train_cfg, standard_training_pool(train_cfg),
                            harden_options(ctx),
                            derive_seed(ctx.opts.seed, stream::kDefenderTrain));
        ctx.manifest["defender_validation_sup"] = trained.validation_sup;
        save_trained_policy((ctx.dir / "defender.qtbl").string(), trained.policy->data());
        ctx.files.push_back("defender.qtbl");
        return trained.policy;
    } catch (const RecipeError&) {
        throw;
    } catch (const std::runtime_error& e) {
        throw RecipeError(RecipeErrorKind::Numerical, e.what());
    }
}

inline TrainedAttackerPolicy resolve_attacker(Context& ctx, const GameConfig& attack_cfg,
                                              const DefenderPolicy& defender,
                                              BestResponseOptions opts) {
    if (!ctx.train.attacker_policy_file.empty())
        return TrainedAttackerPolicy(load_policy_file(ctx.train.attacker_policy_file,
                                                      attack_cfg),
                                     opts.bound);
    try {
        TrainedAttackerPolicy attacker = best_response_attack(
            attack_cfg, defender, opts, derive_seed(ctx.opts.seed, stream::kAttackerTrain));
        save_trained_policy((ctx.dir / "attacker.qtbl").string(), attacker.data());
        ctx.files.push_back("attacker.qtbl");
        return attacker;
    } catch (const RecipeError&) {
        throw;
    } catch (const std::runtime_error& e) {
        throw RecipeError(RecipeErrorKind::Numerical, e.what());
    }
}

inline RulePolicyConfig rule_config(const GameConfig& cfg) {
    RulePolicyConfig rc;
    const BandBoundaries bb = BandBoundaries::from_config(cfg);
    rc.threshold = std::llround(bb.backlog_at_hours(2.0)); // the two-hour backlog
    rc.chunk = cfg.defender_chunk;
    rc.per_hour_cap = cfg.per_hour_cap;
    rc.anchor_low = cfg.cost_anchor_low;
    return rc;
}

inline DailyBound daily_bound_for(const GameConfig& cfg) {
    const long long days =
        std::max(1LL, static_cast<long long>(cfg.horizon_hours) / 24);
    return DailyBound{cfg.attacker_budget / days, 24};
}

// ---------------------------------------------------------------------------
// Recipe implementations
// ---------------------------------------------------------------------------

// trained defender vs a best-response attacker, optionally daily bounded,
// with an attacker budget multiplier and chunk override. The defender always
// trains at the base attacker chunk; the override only changes the attack,
// which is the point of the finer-discretization exploit.
inline RecipeResult adversarial_rl_recipe(const std::string& name, const RecipeOptions& opts,
                                          bool bounded, double budget_factor,
                                          long long attacker_chunk_override = 0) {
    Context ctx = make_context(name, opts);
    require_desk(ctx, name);

    GameConfig train_cfg = ctx.cfg;
    train_cfg.attacker_budget = static_cast<long long>(
        static_cast<double>(train_cfg.defender_budget) * budget_factor);
    train_cfg.attacker_budget -= train_cfg.attacker_budget % train_cfg.attacker_chunk;
    train_cfg.validate();
    GameConfig attack_cfg = train_cfg;
    if (attacker_chunk_override > 0) {
        attack_cfg.attacker_chunk = attacker_chunk_override;
        attack_cfg.validate();
    }

    auto defender = resolve_defender(ctx, train_cfg);

    BestResponseOptions br_opts = best_response_options(ctx);
    if (bounded) {
        br_opts.bound = daily_bound_for(attack_cfg);
        // budget-comparison attacks are ranked by the band they are meant to
        // reach; unbounded ones by the game objective
        br_opts.select_by_red_band = budget_factor != 1.0 || bounded;
    }
    TrainedAttackerPolicy attacker = resolve_attacker(ctx, attack_cfg, *defender, br_opts);

    RecipeResult result;
    result.name = name;
    result.stats.push_back(evaluate_bundle(ctx, name, *defender, attacker, attack_cfg,
                                           derive_seed(opts.seed, stream::kEval)));
    write_stats_csv((ctx.dir / "stats.csv").string(), result.stats);
    ctx.files.push_back("stats.csv");
    finish(ctx, result);
    return result;
}

// rule defender vs its own unbounded best response
inline RecipeResult rule_recipe(const std::string& name, const RecipeOptions& opts,
                                bool aggressive) {
    Context ctx = make_context(name, opts);
    require_desk(ctx, name);
    GameConfig cfg = ctx.cfg;

    RulePolicyConfig rc = rule_config(cfg);
    rc.aggressive = aggressive;
    RuleDefender defender(rc);

    TrainedAttackerPolicy attacker =
        resolve_attacker(ctx, cfg, defender, best_response_options(ctx));

    RecipeResult result;
    result.name = name;
    result.stats.push_back(evaluate_bundle(ctx, name, defender, attacker, cfg,
                                           derive_seed(opts.seed, stream::kEval)));
    write_stats_csv((ctx.dir / "stats.csv").string(), result.stats);
    ctx.files.push_back("stats.csv");
    finish(ctx, result);
    return result;
}

inline RecipeResult double_oracle_recipe(const std::string& name, const RecipeOptions& opts,
                                         bool with_chunk_sweep) {
    Context ctx = make_context(name, opts);
    require_desk(ctx, name);
    const GameConfig coarse_cfg = ctx.cfg; // defender trains against chunk-60 opponents
    GameConfig cfg = ctx.cfg;
    cfg.attacker_chunk = 30; // the finer-discretization attack
    cfg.validate();

    auto defender = resolve_defender(ctx, coarse_cfg);

    DoubleOracleSettings settings;
    settings.max_iterations = ctx.train.double_oracle_iterations;
    settings.improvement_threshold = ctx.train.improvement_threshold;
    settings.eval_runs = std::min(opts.runs, 200);
    settings.defender_hyper.episodes = ctx.train.defender_episodes;
    settings.defender_hyper.epsilon_end = 0.01;
    settings.attacker_hyper.episodes = ctx.train.attacker_episodes;
    settings.aggregation = ctx.defender_agg;
    settings.attacker_aggregation = ctx.attacker_agg;
    settings.br_candidates = ctx.train.br_candidates;
    settings.retrain_candidates = ctx.train.defender_candidates;
    settings.jobs = opts.jobs;

    std::vector<std::shared_ptr<AttackerPolicy>> pool = standard_training_pool(cfg);
    const DoubleOracleResult outcome = run_double_oracle(
        cfg, defender, pool, settings, derive_seed(opts.seed, stream::kDoubleOracle));

    std::ostringstream log;
    for (const auto& entry : outcome.log) log << entry.to_string() << '\n';
    write_text(ctx, "double_oracle_log.txt", log.str());

    RecipeResult result;
    result.name = name;
    const auto* final_trained =
        dynamic_cast<const TrainedDefenderPolicy*>(outcome.final_defender.get());
    if (final_trained) {
        save_trained_policy((ctx.dir / "defender_retrained.qtbl").string(),
                            final_trained->data());
        ctx.files.push_back("defender_retrained.qtbl");
    }

    // final defender against the strongest discovered attacker
    const AttackerPolicy& discovered = *outcome.pool.attackers.back();
    result.stats.push_back(evaluate_bundle(ctx, name, *outcome.final_defender, discovered,
                                           cfg, derive_seed(opts.seed, stream::kEval)));

    if (with_chunk_sweep) {
        BestResponseOptions sweep_opts = best_response_options(ctx);
        sweep_opts.eval_runs = settings.eval_runs;
        const auto sweep =
            chunk_sweep_attack(*outcome.final_defender, ctx.cfg, {60, 30, 10, 1}, sweep_opts,
                               derive_seed(opts.seed, stream::kExtra));
        std::ostringstream sweep_log;
        for (const auto& entry : sweep) {
            StatsRow row;
            row.label = "chunk-" + std::to_string(entry.chunk);
            row.mean_sup_cost = entry.stats.mean_sup_cost;
            row.proportions = entry.stats.proportions;
            row.worst_run_max_backlog = entry.stats.worst_run_max_backlog;
            row.runs = entry.stats.runs;
            result.stats.push_back(row);
            sweep_log << "chunk=" << entry.chunk << ' ' << entry.stats.to_string() << '\n';
        }
        write_text(ctx, "chunk_sweep.txt", sweep_log.str());
    }

    write_stats_csv((ctx.dir / "stats.csv").string(), result.stats);
    ctx.files.push_back("stats.csv");
    finish(ctx, result);
    return result;
}

inline RecipeResult rules_chunk_attack_recipe(const std::string& name,
                                              const RecipeOptions& opts) {
    Context ctx = make_context(name, opts);
    require_desk(ctx, name);
    GameConfig cfg = ctx.cfg;
    cfg.attacker_chunk = 30;
    cfg.validate();

    RecipeResult result;
    result.name = name;
    for (bool aggressive : {false, true}) {
        RulePolicyConfig rc = rule_config(cfg);
        rc.aggressive = aggressive;
        RuleDefender defender(rc);
        const std::string label = aggressive ? "s2" : "s1";
        BestResponseOptions br_opts = best_response_options(ctx);
        br_opts.bound = daily_bound_for(cfg);
        TrainedAttackerPolicy attacker = best_response_attack(
            cfg, defender, br_opts,
            derive_seed(opts.seed, stream::kAttackerTrain, aggressive ? 1 : 0));
        result.stats.push_back(evaluate_bundle(
            ctx, label + "-chunk30", defender, attacker, cfg,
            derive_seed(opts.seed, stream::kEval, aggressive ? 1 : 0), label));
    }
    write_stats_csv((ctx.dir / "stats.csv").string(), result.stats);
    ctx.files.push_back("stats.csv");
    finish(ctx, result);
    return result;
}

inline RecipeResult theorem1_checks_recipe(const std::string& name,
                                           const RecipeOptions& opts) {
    Context ctx = make_context(name, opts);
    std::ostringstream report;
    report.precision(10);

    // dump-attack arithmetic at the full-scale operating point
    GameConfig dump_cfg = paper_config();
    dump_cfg.attacker_budget = dump_cfg.defender_budget + 2 * dump_cfg.per_hour_cap;
    const DumpAttackReport dump = dump_attack_analysis(dump_cfg);
    report << "dump attack analysis (X=" << dump_cfg.defender_budget
           << ", Y=" << dump_cfg.attacker_budget << ")\n";
    report << "  dump_hours = " << dump.dump_hours << "\n";
    report << "  total_sent = " << dump.total_sent << "\n";
    report << "  arrivals_floor = " << dump.arrivals_floor << "\n";
    report << "  normal_service = " << dump.normal_service << "\n";
    report << "  absorbed = " << dump.absorbed << "\n";
    report << "  guaranteed_backlog = " << dump.guaranteed_backlog << "\n";
    report << "  cost_at_residual = " << dump.cost_at_residual << "\n";
    report << "  tail_bound = " << dump.tail_bound << "\n";
    report << "  confidence = " << dump.confidence << "\n";
    report << "  utility_bound = " << dump.utility_bound << "\n";
    report << "  utility_bound_exact = " << dump.utility_bound_exact << "\n\n";

    // lower-bound formula across thresholds, plus the known quote mismatch
    report << "threshold-rule lower bound (N=336, mu=1920)\n";
    for (long long b : {1200LL, 1500LL, 2233LL, 3000LL, 4350LL, 6000LL}) {
        BoundInputs in;
        in.threshold = b;
        report << "  B=" << b << " -> " << theorem1_lower_bound(in) << "\n";
    }
    const Theorem1ExampleReport example = theorem1_example_report();
    report << "  note: quoted example at B=1500 is " << example.quoted_value
           << "; the formula evaluates to " << example.formula_value
           << (example.matches_quote ? " (consistent)\n\n" : " (discrepancy surfaced)\n\n");

    report << "poisson lower-tail bound\n";
    report << "  (lambda=1919, 14h, 0.3) = " << poisson_lower_tail_bound(1919.0, 14, 0.3)
           << "\n\n";

    // busy-cycle tail at the scaled queue
    {
        QueueParams qp;
        qp.lambda_nominal = 9.0;
        qp.mu_nominal = 10.0;
        qp.disturbance = DisturbanceModel::fixed();
        const auto trace = simulate_natural_trace(qp, 1000000, derive_seed(opts.seed, 71), 0);
        const BusyCycleStats cycles = busy_cycle_stats(trace, 0);
        report << "busy cycles (lambda=9, mu=10, 1e6 hours)\n";
        report << "  closed_cycles = " << cycles.closed_cycles << "\n";
        bool all_ok = true;
        for (long long j = 2; j <= 50; ++j)
            if (cycles.tail(j) > 1.0 / static_cast<double>(j)) all_ok = false;
        report << "  tail(j) <= 1/j for j in [2,50]: " << (all_ok ? "yes" : "NO") << "\n";
        for (long long j : {2LL, 5LL, 10LL, 20LL, 50LL})
            report << "  tail(" << j << ") = " << cycles.tail(j) << " (bound " << 1.0 / j
                   << ")\n";
        report << "\n";
    }

    // paired spend-dominance check at the scaled operating point
    {
        GameConfig cfg = desk_config();
        cfg.queue.lambda_nominal = 90.0;
        cfg.queue.mu_nominal = 100.0;
        cfg.queue.disturbance = DisturbanceModel::fixed();
        cfg.initial_backlog = 0;
        const std::vector<std::vector<long long>> schedules{
            dump_schedule(cfg.attacker_budget, cfg.per_hour_cap, cfg.horizon_hours)};
        const PairedCheckReport paired = paired_s1_guarantee_check(
            cfg, schedules, 120, opts.runs, derive_seed(opts.seed, 72));
        report << "paired spend-dominance check (lambda=90, mu=100, B=120, dump Y=X)\n";
        report << "  qualifying_runs = " << paired.runs_qualifying << " / "
               << paired.runs_total << "\n";
        report << "  violations = " << paired.violations.size() << "\n\n";
    }

    // Monte-Carlo confirmation of the dump guarantee at full scale: no
    // defender, rule or otherwise, escapes the residual backlog
    {
        GameConfig cfg = dump_cfg;
        cfg.queue.disturbance = DisturbanceModel::fixed();
        DumpAttacker dump_attacker(cfg.per_hour_cap);
        const double floor_value =
            4210.0 - 3.0 * std::sqrt(14.0 * cfg.queue.lambda_nominal);
        RulePolicyConfig rc = rule_config(cfg);
        RulePolicyConfig rc2 = rc;
        rc2.aggressive = true;
        std::vector<std::pair<std::string, std::unique_ptr<DefenderPolicy>>> defenders;
        defenders.emplace_back("zero", std::make_unique<ZeroDefender>());
        defenders.emplace_back("s1", std::make_unique<RuleDefender>(rc));
        defenders.emplace_back("s2", std::make_unique<RuleDefender>(rc2));
        defenders.emplace_back("full-spend",
                               std::make_unique<FullSpendDefender>(cfg.per_hour_cap));
        const int runs = opts.runs;
        report << "dump attack Monte-Carlo (" << runs << " runs per defender)\n";
        for (const auto& [label, defender] : defenders) {
            int ok = 0;
            for (int r = 0; r < runs; ++r) {
                const RunTrace trace =
                    episode(*defender, dump_attacker, cfg,
                            derive_seed(opts.seed, 73, static_cast<std::uint64_t>(r)));
                if (static_cast<double>(trace.hours[13].backlog_post) >= floor_value) ++ok;
            }
            report << "  " << label << ": hour-14 backlog >= " << floor_value << " in "
                   << ok << " runs\n";
        }
    }

    write_text(ctx, "bounds_report.txt", report.str());
    RecipeResult result;
    result.name = name;
    finish(ctx, result);
    return result;
}

} // namespace recipe_detail

inline RecipeResult run_recipe(const std::string& name, const RecipeOptions& opts) {
    using namespace recipe_detail;
    if (name == "equal-budget-daily-bound") return adversarial_rl_recipe(name, opts, true, 1.0);
    if (name == "equal-budget-unbounded") return adversarial_rl_recipe(name, opts, false, 1.0);
    if (name == "ten-percent-extra") return adversarial_rl_recipe(name, opts, true, 1.1);
    if (name == "s1-vs-unbounded") return rule_recipe(name, opts, false);
    if (name == "s2-vs-unbounded") return rule_recipe(name, opts, true);
    if (name == "chunk30-attack")
        return adversarial_rl_recipe(name, opts, true, 1.0, 30);
    if (name == "double-oracle-defense") return double_oracle_recipe(name, opts, false);
    if (name == "chunk-sweep") return double_oracle_recipe(name, opts, true);
    if (name == "s1-s2-chunk-attack") return rules_chunk_attack_recipe(name, opts);
    if (name == "theorem1-checks") return theorem1_checks_recipe(name, opts);
    throw RecipeError(RecipeErrorKind::Config,
                      "unknown recipe '" + name + "'; use --list-recipes");
}

} // namespace csoc
