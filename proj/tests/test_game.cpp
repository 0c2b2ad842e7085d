#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <memory>

#include "csoc/game.hpp"
#include "csoc/policies.hpp"

using namespace csoc;

TEST_CASE("cost function: exact anchors and interpolation") {
    CostFunction f;
    CHECK(f(1175.0) == 0.0);
    CHECK(f(4350.0) == 1.0);
    CHECK(f((1175.0 + 4350.0) / 2.0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(f(4210.0) == doctest::Approx(3035.0 / 3175.0).epsilon(1e-12)); // 0.955905...
    CHECK(f(0.0) == 0.0);
    CHECK(f(100000.0) == 1.0);
    // monotone, bounded
    double prev = -1.0;
    for (long long b = 0; b <= 6000; b += 25) {
        const double v = f(static_cast<double>(b));
        CHECK(v >= prev);
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        prev = v;
    }
}

TEST_CASE("config validation") {
    GameConfig cfg = paper_config();
    CHECK_NOTHROW(cfg.validate());

    GameConfig bad = cfg;
    bad.defender_chunk = 70; // does not divide 2400
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    bad = cfg;
    bad.cost_anchor_low = 5000;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    bad = cfg;
    bad.horizon_hours = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    bad = cfg;
    bad.attacker_budget = -1;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("reset: full-scale initial state") {
    GameConfig cfg = paper_config();
    const ResetResult r = reset(cfg);
    CHECK(r.state.backlog == 1175);
    CHECK(r.state.remaining_hours == 336);
    CHECK(r.state.defender_remaining == 28800);
    CHECK(r.state.attacker_remaining == 28800);
    CHECK(r.defender_obs.backlog == 1175);
    CHECK(r.defender_obs.defender_remaining == 28800);
    CHECK(r.defender_obs.last_defender_action == 0);
    CHECK(r.attacker_obs.state.attacker_remaining == 28800);
}

TEST_CASE("legal action sets") {
    GameConfig cfg = paper_config();
    CHECK(legal_actions_defender(cfg).size() == 41); // chunk 60, cap 2400

    cfg.attacker_chunk = 30;
    CHECK(legal_actions_attacker(cfg).size() == 81); // chunk 30, cap 2400

    GameConfig tight = paper_config();
    tight.defender_chunk = tight.per_hour_cap;
    tight.attacker_chunk = tight.per_hour_cap;
    CHECK(legal_actions_defender(tight) == std::vector<long long>{0, 2400});
    CHECK(legal_actions_attacker(tight) == std::vector<long long>{0, 2400});

    GameConfig zero = paper_config();
    zero.per_hour_cap = 0;
    CHECK(legal_actions_defender(zero) == std::vector<long long>{0});
    CHECK(legal_actions_attacker(zero) == std::vector<long long>{0});

    // uncapped variant: attacker bounded by its budget instead of E
    GameConfig uncapped = paper_config();
    uncapped.attacker_hour_capped = false;
    uncapped.attacker_budget = 150;
    CHECK(attacker_action_cap(uncapped) == 120);
    CHECK(legal_actions_attacker(uncapped) == std::vector<long long>{0, 60, 120});
}

TEST_CASE("defender_cost: anchored values") {
    GameConfig cfg = paper_config();
    GameState s = initial_state(cfg);
    s.backlog = 1175;
    CHECK(defender_cost(cfg, s, 0) == 0.0);
    s.backlog = 4350;
    CHECK(defender_cost(cfg, s, 0) == 1.0);
    s.backlog = 4210;
    CHECK(defender_cost(cfg, s, 0) == doctest::Approx(0.955905511811).epsilon(1e-9));
    // spend clamped by remaining budget
    s.backlog = 4350;
    s.defender_remaining = 60;
    CHECK(defender_cost(cfg, s, 2400) ==
          doctest::Approx(CostFunction{}(4290.0)).epsilon(1e-12));
}

TEST_CASE("step: bookkeeping and clamps") {
    GameConfig cfg = paper_config();
    Rng rng(3);

    GameState s{2000, 10, 5000, 5000};
    const StepResult r = step(cfg, s, 2400, 0, rng);
    CHECK(r.next.defender_remaining == 2600);
    CHECK(r.post_allocation_backlog == 0);
    CHECK(r.next.remaining_hours == 9);
    CHECK(r.defender_spent == 2400); // budget clamp, not backlog clamp

    GameState s2{1000, 10, 5000, 100};
    const StepResult r2 = step(cfg, s2, 0, 2400, rng);
    CHECK(r2.injected == 100);
    CHECK(r2.next.attacker_remaining == 0);

    GameState terminal{0, 0, 0, 0};
    CHECK_THROWS_AS(step(cfg, terminal, 0, 0, rng), std::logic_error);

    CHECK_THROWS_AS(step(cfg, s, 61, 0, rng), std::invalid_argument);   // off-chunk
    CHECK_THROWS_AS(step(cfg, s, 0, 2460, rng), std::invalid_argument); // above cap
}

TEST_CASE("step: drain case with negligible arrivals") {
    GameConfig cfg = desk_config();
    cfg.queue.lambda_nominal = 1e-9;
    cfg.queue.disturbance = DisturbanceModel::fixed();
    cfg.initial_backlog = 50; // below hourly capacity 96
    Rng rng(8);
    GameState s = initial_state(cfg);
    const StepResult r = step(cfg, s, 0, 0, rng);
    CHECK(r.next.backlog == 0);
}

TEST_CASE("shaped rewards: neutral point, floor, extremes") {
    GameConfig cfg = desk_config(); // X = 1200, N = 48
    cfg.shaping_weight = 0.1;
    // x' / n' at the budget-neutral rate X/N = 25 -> q = 0.5
    GameState s{0, 25, 600, 600};
    CHECK(shaped_reward_defender(cfg, s, 0) == doctest::Approx(0.05).epsilon(1e-12));
    CHECK(shaped_reward_attacker(cfg, s, 0, 0) == doctest::Approx(0.05).epsilon(1e-12));

    // exhausted budget -> q = 0
    GameState drained{0, 25, 0, 0};
    CHECK(shaped_reward_defender(cfg, drained, 0) == 0.0);
    CHECK(shaped_reward_attacker(cfg, drained, 0, 0) == 0.0);

    // full budget late in the game -> q clamps to 1
    GameState hoarding{0, 25, 1200, 1200};
    CHECK(shaped_reward_defender(cfg, hoarding, 0) == doctest::Approx(0.1).epsilon(1e-12));

    // attacker extreme: cost term 1 plus full shaping
    GameState flooded{4000, 25, 0, 1200};
    flooded.backlog = 300; // above the high anchor 240
    CHECK(shaped_reward_attacker(cfg, flooded, 0, 0) ==
          doctest::Approx(1.0 + 0.1).epsilon(1e-12));
}

TEST_CASE("episode: trivial sup, determinism, illegal policies") {
    GameConfig cfg = desk_config();
    cfg.queue.lambda_nominal = 1e-9;
    cfg.queue.disturbance = DisturbanceModel::fixed();
    cfg.initial_backlog = 0;

    ZeroDefender zd;
    ZeroAttacker za;
    const RunTrace quiet = episode(zd, za, cfg, 77);
    CHECK(quiet.sup_cost == 0.0);
    CHECK(quiet.max_backlog == 0);

    GameConfig live = desk_config();
    const RunTrace t1 = episode(zd, za, live, 123);
    const RunTrace t2 = episode(zd, za, live, 123);
    REQUIRE(t1.hours.size() == t2.hours.size());
    for (std::size_t i = 0; i < t1.hours.size(); ++i) {
        CHECK(t1.hours[i].backlog_post == t2.hours[i].backlog_post);
        CHECK(t1.hours[i].stage_cost == t2.hours[i].stage_cost);
    }

    struct RogueDefender final : DefenderPolicy {
        long long act(const DefenderObservation&) override { return 61; }
        PolicyManifest manifest() const override { return {"rogue", {}, {}}; }
        std::unique_ptr<DefenderPolicy> clone() const override {
            return std::make_unique<RogueDefender>(*this);
        }
    } rogue;
    CHECK_THROWS_AS(episode(rogue, za, live, 1), std::runtime_error);
}

TEST_CASE("episode: budget monotonicity, zero-sum bookkeeping, cost bounds") {
    GameConfig cfg = desk_config();
    DumpAttacker dump(cfg.per_hour_cap);
    FullSpendDefender full(cfg.per_hour_cap);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const RunTrace trace = episode(full, dump, cfg, 5000 + seed);
        long long x_prev = cfg.defender_budget;
        long long y_prev = cfg.attacker_budget;
        long long spend = 0, injected = 0;
        for (const auto& h : trace.hours) {
            CHECK(h.defender_remaining <= x_prev);
            CHECK(h.attacker_remaining <= y_prev);
            x_prev = h.defender_remaining;
            y_prev = h.attacker_remaining;
            spend += h.defender_spent;
            injected += h.injected;
            CHECK(h.stage_cost >= 0.0);
            CHECK(h.stage_cost <= 1.0);
            // unshaped attacker reward is +cost, defender reward is -cost
            CHECK(h.stage_cost + (-h.stage_cost) == 0.0);
        }
        CHECK(spend <= cfg.defender_budget);
        CHECK(injected <= cfg.attacker_budget);
        CHECK(trace.sup_cost >= 0.0);
        CHECK(trace.sup_cost <= 1.0);
    }
}

TEST_CASE("episode: defender observation is a sound projection") {
    GameConfig cfg = desk_config();
    // a defender that cross-checks its observation against the env contract
    struct Auditor final : DefenderPolicy {
        long long expected_x;
        long long last_action = 0;
        explicit Auditor(long long x) : expected_x(x) {}
        long long act(const DefenderObservation& obs) override {
            CHECK(obs.defender_remaining == expected_x);
            CHECK(obs.last_defender_action == last_action);
            last_action = obs.backlog > 120 ? 60 : 0;
            expected_x = std::max(0LL, expected_x - last_action);
            return last_action;
        }
        PolicyManifest manifest() const override { return {"auditor", {}, {}}; }
        std::unique_ptr<DefenderPolicy> clone() const override {
            return std::make_unique<Auditor>(*this);
        }
    } auditor(cfg.defender_budget);
    DumpAttacker dump(cfg.per_hour_cap);
    episode(auditor, dump, cfg, 99);
}

TEST_CASE("episode: X = 0 means no effective defender spend") {
    GameConfig cfg = desk_config();
    cfg.defender_budget = 0;
    FullSpendDefender greedy(cfg.per_hour_cap);
    DumpAttacker dump(cfg.per_hour_cap);
    const RunTrace trace = episode(greedy, dump, cfg, 4);
    CHECK(trace.total_defender_spend() == 0);
}

TEST_CASE("episode: full-scale dump overwhelms a passive defender") {
    GameConfig cfg = paper_config();
    cfg.attacker_budget = 33600; // budget advantage regime
    ZeroDefender zero;
    DumpAttacker dump(cfg.per_hour_cap);
    int reached_one = 0;
    const int runs = 100;
    for (int r = 0; r < runs; ++r) {
        const RunTrace trace = episode(zero, dump, cfg, 40000 + static_cast<std::uint64_t>(r));
        if (trace.sup_cost >= 1.0) ++reached_one;
    }
    CHECK(reached_one >= 99);
}

TEST_CASE("config hash: sensitive to every field") {
    GameConfig a = paper_config();
    GameConfig b = a;
    CHECK(config_hash(a) == config_hash(b));
    b.attacker_chunk = 30;
    CHECK(config_hash(a) != config_hash(b));
    b = a;
    b.shaping_weight = 0.2;
    CHECK(config_hash(a) != config_hash(b));
    b = a;
    b.queue.lambda_nominal = 1918.0;
    CHECK(config_hash(a) != config_hash(b));
}
