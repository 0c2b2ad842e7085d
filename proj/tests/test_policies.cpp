#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <memory>

#include "csoc/game.hpp"
#include "csoc/policies.hpp"

using namespace csoc;

namespace {

RulePolicyConfig paper_rule(bool aggressive = false) {
    RulePolicyConfig rc;
    rc.threshold = 2233;
    rc.aggressive = aggressive;
    rc.chunk = 60;
    rc.per_hour_cap = 2400;
    rc.anchor_low = 1175;
    return rc;
}

DefenderObservation obs_with_backlog(long long backlog) {
    return DefenderObservation{backlog, 100, 100000, 0};
}

} // namespace

TEST_CASE("s1: threshold excess, rounded up, capped") {
    const RulePolicyConfig rc = paper_rule();
    CHECK(s1_decide(obs_with_backlog(2233), rc) == 0);
    CHECK(s1_decide(obs_with_backlog(2000), rc) == 0);
    CHECK(s1_decide(obs_with_backlog(2300), rc) == 120); // raw 67 -> two chunks
    CHECK(s1_decide(obs_with_backlog(2233 + 10 * 2400), rc) == 2400);
}

TEST_CASE("s2: adds the band down to the low anchor once triggered") {
    const RulePolicyConfig rc = paper_rule(true);
    CHECK(s2_decide(obs_with_backlog(2233), rc) == 0);
    CHECK(s2_decide(obs_with_backlog(1500), rc) == 0);
    CHECK(s2_decide(obs_with_backlog(2300), rc) == 1140); // 67 + 1058 -> 1140
}

TEST_CASE("s2: uncapped allocation pulls the backlog back to the anchor") {
    RulePolicyConfig rc = paper_rule(true);
    rc.per_hour_cap = 1000000; // effectively uncapped
    for (long long b = 2234; b < 9000; b += 37) {
        const long long d = s2_decide(obs_with_backlog(b), rc);
        const long long post = b - d;
        CHECK(post <= rc.anchor_low);
        CHECK(post > rc.anchor_low - rc.chunk);
    }
}

TEST_CASE("rule config validation") {
    RulePolicyConfig rc = paper_rule();
    rc.threshold = 1000; // below the anchor
    CHECK_THROWS_AS(RuleDefender{rc}, std::invalid_argument);
}

TEST_CASE("dump attacker: dumps the cap while budget lasts") {
    GameConfig cfg = paper_config();
    cfg.attacker_budget = 33600;
    DumpAttacker dump(cfg.per_hour_cap);
    ZeroDefender zero;
    const RunTrace trace = episode(zero, dump, cfg, 17);

    // full cap for exactly 14 hours, then silence
    for (int h = 0; h < 14; ++h) CHECK(trace.hours[h].injected == 2400);
    CHECK(trace.hours[13].attacker_remaining == 0);
    for (std::size_t h = 14; h < trace.hours.size(); ++h)
        CHECK(trace.hours[h].injected == 0);

    // requests the cap even when the remaining budget is smaller
    AttackerObservation tail_obs;
    tail_obs.state = GameState{0, 10, 0, 100};
    CHECK(dump.act(tail_obs) == 2400);
    tail_obs.state.attacker_remaining = 0;
    CHECK(dump.act(tail_obs) == 0);
}

TEST_CASE("daily bound: first-hour truncation at the chunk floor") {
    auto wrapped = daily_bounded(std::make_unique<DumpAttacker>(2400),
                                 DailyBound{2057, 24}, 60);
    wrapped->begin_episode(1);
    AttackerObservation obs;
    obs.state = GameState{0, 336, 28800, 28800};
    CHECK(wrapped->act(obs) == 2040); // floor(2057/60)*60

    auto ten_percent = daily_bounded(std::make_unique<DumpAttacker>(2400),
                                     DailyBound{2262, 24}, 60);
    ten_percent->begin_episode(1);
    CHECK(ten_percent->act(obs) == 2220); // floor(2262/60)*60
}

TEST_CASE("daily bound: zero stays zero") {
    auto wrapped = daily_bounded(std::make_unique<ZeroAttacker>(), DailyBound{2057, 24}, 60);
    wrapped->begin_episode(1);
    AttackerObservation obs;
    obs.state = GameState{0, 336, 28800, 28800};
    for (int h = 0; h < 48; ++h) CHECK(wrapped->act(obs) == 0);
}

TEST_CASE("daily bound: every calendar-day window respects the limit") {
    GameConfig cfg = desk_config();
    const DailyBound bound{600, 24};
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        auto attacker = daily_bounded(
            std::make_unique<StochasticRateAttacker>(
                std::vector<std::pair<double, double>>{{0.0, 0.3}, {40.0, 0.4}, {120.0, 0.3}},
                cfg.attacker_chunk, cfg.per_hour_cap),
            bound, cfg.attacker_chunk);
        ZeroDefender zero;
        const RunTrace trace = episode(zero, *attacker, cfg, 600 + seed);
        for (std::size_t day = 0; day * 24 < trace.hours.size(); ++day) {
            long long spent = 0;
            for (std::size_t h = day * 24; h < std::min(trace.hours.size(), (day + 1) * 24);
                 ++h)
                spent += trace.hours[h].attacker_action;
            CHECK(spent <= bound.per_day_limit);
        }
    }
}

TEST_CASE("stochastic attacker: degenerate zero rate never injects") {
    GameConfig cfg = desk_config();
    StochasticRateAttacker atk({{0.0, 1.0}}, cfg.attacker_chunk, cfg.per_hour_cap);
    ZeroDefender zero;
    const RunTrace trace = episode(zero, atk, cfg, 12);
    CHECK(trace.total_injected() == 0);
}

TEST_CASE("stochastic attacker: constant rate obeys the floor bias band") {
    // chunk-flooring a Poisson(r) draw loses at most one chunk per hour, and
    // the cap clips the far tail, so the mean lands in (r - chunk - eps, r]
    GameConfig cfg = desk_config();
    const double rate = 55.0;
    StochasticRateAttacker atk({{rate, 1.0}}, cfg.attacker_chunk, cfg.per_hour_cap);
    atk.begin_episode(31);
    AttackerObservation obs;
    obs.state = GameState{0, 48, 1200, 100000000};
    double total = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) total += static_cast<double>(atk.act(obs));
    const double mean = total / n;
    CHECK(mean <= rate);
    CHECK(mean > rate - static_cast<double>(cfg.attacker_chunk) - 1.0);
}

TEST_CASE("stochastic attacker: distribution validation") {
    CHECK_THROWS_AS(StochasticRateAttacker({{-1.0, 1.0}}, 60, 2400), std::invalid_argument);
    CHECK_THROWS_AS(StochasticRateAttacker({{5.0, 0.5}}, 60, 2400), std::invalid_argument);
    CHECK_THROWS_AS(StochasticRateAttacker({}, 60, 2400), std::invalid_argument);
}

TEST_CASE("all policies emit legal actions on random observations") {
    GameConfig cfg = desk_config();
    Rng rng(441);

    RulePolicyConfig rc;
    rc.threshold = 120;
    rc.chunk = cfg.defender_chunk;
    rc.per_hour_cap = cfg.per_hour_cap;
    rc.anchor_low = cfg.cost_anchor_low;
    RuleDefender s1(rc);
    RulePolicyConfig rc2 = rc;
    rc2.aggressive = true;
    RuleDefender s2(rc2);
    DumpAttacker dump(cfg.per_hour_cap);
    StochasticRateAttacker stochastic({{0.0, 0.5}, {70.0, 0.5}}, cfg.attacker_chunk,
                                      cfg.per_hour_cap);
    stochastic.begin_episode(5);
    auto bounded = daily_bounded(std::make_unique<DumpAttacker>(cfg.per_hour_cap),
                                 DailyBound{600, 24}, cfg.attacker_chunk);
    bounded->begin_episode(6);

    for (int i = 0; i < 3000; ++i) {
        GameState s;
        s.backlog = static_cast<long long>(rng.uniform_below(2000));
        s.remaining_hours = 1 + static_cast<int>(rng.uniform_below(48));
        s.defender_remaining = static_cast<long long>(rng.uniform_below(1201));
        s.attacker_remaining = static_cast<long long>(rng.uniform_below(1201));
        const DefenderObservation dobs = make_defender_observation(s, 0);
        const AttackerObservation aobs = make_attacker_observation(s, 0, 0);
        CHECK(is_legal_defender_action(cfg, s1.act(dobs)));
        CHECK(is_legal_defender_action(cfg, s2.act(dobs)));
        CHECK(is_legal_attacker_action(cfg, dump.act(aobs)));
        CHECK(is_legal_attacker_action(cfg, stochastic.act(aobs)));
        CHECK(is_legal_attacker_action(cfg, bounded->act(aobs)));
    }
}

TEST_CASE("policy manifests carry kind and parameters") {
    RuleDefender s1(paper_rule());
    CHECK(s1.manifest().kind == "s1_defender");
    RuleDefender s2(paper_rule(true));
    CHECK(s2.manifest().kind == "s2_defender");
    auto bounded = daily_bounded(std::make_unique<DumpAttacker>(2400), DailyBound{2057, 24}, 60);
    const PolicyManifest m = bounded->manifest();
    CHECK(m.kind == "daily_bounded");
    REQUIRE(m.children.size() == 1);
    CHECK(m.children[0].kind == "dump_attacker");
    CHECK(m.to_string().find("per_day_limit=2057") != std::string::npos);
}
