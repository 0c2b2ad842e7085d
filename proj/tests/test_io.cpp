#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "csoc/config_io.hpp"
#include "csoc/csv.hpp"
#include "csoc/recipes.hpp"
#include "csoc/svg.hpp"

using namespace csoc;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream oss;
    oss << in.rdbuf();
    return oss.str();
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write_file(const fs::path& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    out << body;
}

} // namespace

TEST_CASE("trace csv: exact row schema") {
    RunTrace trace;
    trace.initial_backlog = 1175;
    HourRecord h;
    h.hour = 1;
    h.backlog_pre = 1175;
    h.defender_action = 120;
    h.attacker_action = 60;
    h.backlog_post = 1190;
    h.defender_remaining = 28680;
    h.attacker_remaining = 28740;
    h.stage_cost = 0.0123456789;
    trace.hours.push_back(h);

    std::ostringstream out;
    write_trace_csv(out, trace);
    CHECK(out.str() == "hour,b_pre,d,a,b_post,x,y,stage_cost\n"
                       "1,1175,120,60,1190,28680,28740,0.012346\n");
}

TEST_CASE("config file: parse, apply, unknown keys rejected") {
    const fs::path dir = fresh_dir("csoc_io_cfg");
    write_file(dir / "good.cfg",
               "# comment\n"
               "lambda_alerts_per_hour = 90\n"
               "mu_alerts_per_hour = 96\n"
               "mu_mode = fixed\n"
               "horizon_hours = 48\n"
               "attacker_chunk_alerts = 30\n"
               "train_episodes_defender = 500\n");
    GameConfig cfg = desk_config();
    TrainSettings train;
    apply_config_file(cfg, train, (dir / "good.cfg").string());
    CHECK(cfg.queue.lambda_nominal == 90.0);
    CHECK(cfg.queue.disturbance.mode == DisturbanceModel::Mode::Fixed);
    CHECK(cfg.attacker_chunk == 30);
    CHECK(train.defender_episodes == 500);

    write_file(dir / "typo.cfg", "lambda_alerts_per_hr = 90\n");
    GameConfig cfg2 = desk_config();
    TrainSettings train2;
    CHECK_THROWS_WITH_AS(apply_config_file(cfg2, train2, (dir / "typo.cfg").string()),
                         doctest::Contains("unknown key"), std::invalid_argument);

    write_file(dir / "bad.cfg", "horizon_hours = soon\n");
    CHECK_THROWS_AS(apply_config_file(cfg2, train2, (dir / "bad.cfg").string()),
                    std::invalid_argument);

    write_file(dir / "noeq.cfg", "horizon_hours 48\n");
    CHECK_THROWS_AS(apply_config_file(cfg2, train2, (dir / "noeq.cfg").string()),
                    std::invalid_argument);

    // render -> reparse round trip
    const std::string rendered = render_config(cfg, train);
    std::istringstream in(rendered);
    GameConfig cfg3 = paper_config();
    TrainSettings train3;
    for (const auto& [k, v] : parse_config_lines(in)) apply_config_entry(cfg3, train3, k, v);
    CHECK(config_hash(cfg3) == config_hash(cfg));
    CHECK(train3.defender_episodes == train.defender_episodes);
    fs::remove_all(dir);
}

TEST_CASE("svg: chart pair renders plausible documents") {
    const fs::path dir = fresh_dir("csoc_io_svg");
    GameConfig cfg = desk_config();
    ZeroDefender zd;
    DumpAttacker dump(cfg.per_hour_cap);
    const RunTrace trace = episode(zd, dump, cfg, 5);
    write_worst_run_svg((dir / "run.svg").string(), trace,
                        BandBoundaries::from_config(cfg), "test");
    const std::string svg = slurp(dir / "run.svg");
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(svg.find("#d62728") != std::string::npos); // dump forces red hours

    write_proportions_svg((dir / "donut.svg").string(), {0.5, 0.25, 0.15, 0.1}, "test");
    const std::string donut = slurp(dir / "donut.svg");
    CHECK(donut.find("path") != std::string::npos);
    CHECK(donut.find("50.0%") != std::string::npos);

    write_proportions_svg((dir / "full.svg").string(), {1.0, 0.0, 0.0, 0.0}, "test");
    CHECK(slurp(dir / "full.svg").find("circle") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("recipe catalog: nonempty, unique, all resolvable") {
    const auto names = list_recipes();
    CHECK_FALSE(names.empty());
    std::set<std::string> unique(names.begin(), names.end());
    CHECK(unique.size() == names.size());
    for (const auto& r : recipe_catalog()) {
        CHECK_FALSE(r.name.empty());
        CHECK_FALSE(r.description.empty());
    }
    RecipeOptions opts;
    CHECK_THROWS_AS(run_recipe("no-such-recipe", opts), RecipeError);
}

TEST_CASE("run_recipe: byte-identical bundles for a fixed seed") {
    const fs::path dir = fresh_dir("csoc_io_det");
    write_file(dir / "tiny.cfg",
               "train_episodes_defender = 120\n"
               "train_episodes_attacker = 120\n"
               "defender_candidates = 1\n"
               "best_response_candidates = 1\n"
               "harden_iterations = 0\n");

    RecipeOptions opts;
    opts.runs = 3;
    opts.seed = 4242;
    opts.config_file = (dir / "tiny.cfg").string();

    opts.out_dir = (dir / "a").string();
    const RecipeResult a = run_recipe("equal-budget-unbounded", opts);
    opts.out_dir = (dir / "b").string();
    opts.jobs = 2; // thread count must not change the artifacts
    const RecipeResult b = run_recipe("equal-budget-unbounded", opts);

    for (const std::string name : {"traces.csv", "worst_run.csv", "stats.csv"}) {
        CHECK(slurp(dir / "a" / name) == slurp(dir / "b" / name));
    }
    CHECK(slurp(dir / "a" / "worst_run.svg") == slurp(dir / "b" / "worst_run.svg"));

    // the bundle carries everything promised
    for (const std::string name :
         {"manifest.json", "traces.csv", "worst_run.csv", "stats.csv", "worst_run.svg",
          "proportions.svg", "defender.qtbl", "attacker.qtbl"}) {
        CHECK(fs::exists(dir / "a" / name));
    }

    // different seed, different traces
    opts.out_dir = (dir / "c").string();
    opts.seed = 4243;
    run_recipe("equal-budget-unbounded", opts);
    CHECK(slurp(dir / "a" / "traces.csv") != slurp(dir / "c" / "traces.csv"));
    fs::remove_all(dir);
}

TEST_CASE("run_recipe: error taxonomy maps to distinct exit codes") {
    const fs::path dir = fresh_dir("csoc_io_err");
    RecipeOptions opts;
    opts.out_dir = (dir / "out").string();

    // config error: bad scale
    opts.scale = "galactic";
    try {
        run_recipe("theorem1-checks", opts);
        FAIL("expected RecipeError");
    } catch (const RecipeError& e) {
        CHECK(e.exit_code() == 2);
    }
    opts.scale = "desk";

    // config error: training recipes refuse paper scale
    opts.scale = "paper";
    try {
        run_recipe("equal-budget-unbounded", opts);
        FAIL("expected RecipeError");
    } catch (const RecipeError& e) {
        CHECK(e.exit_code() == 2);
    }
    opts.scale = "desk";

    // missing artifact: config file that does not exist
    opts.config_file = (dir / "absent.cfg").string();
    try {
        run_recipe("theorem1-checks", opts);
        FAIL("expected RecipeError");
    } catch (const RecipeError& e) {
        CHECK(e.exit_code() == 3);
    }

    // missing artifact: referenced policy file absent
    write_file(dir / "ref.cfg", "defender_policy_file = " + (dir / "ghost.qtbl").string() +
                                    "\ntrain_episodes_attacker = 50\n"
                                    "best_response_candidates = 1\n");
    opts.config_file = (dir / "ref.cfg").string();
    try {
        run_recipe("equal-budget-unbounded", opts);
        FAIL("expected RecipeError");
    } catch (const RecipeError& e) {
        CHECK(e.exit_code() == 3);
    }
    fs::remove_all(dir);
}

TEST_CASE("run_recipe: policy trained under another config is refused") {
    const fs::path dir = fresh_dir("csoc_io_hash");
    // train a tiny defender under a config that differs from the recipe's
    GameConfig other = desk_config();
    other.defender_budget = 600; // provenance mismatch
    OpponentMix mix;
    mix.entries.emplace_back(std::make_shared<ZeroAttacker>(), 1.0);
    Hyperparams hyper;
    hyper.episodes = 20;
    TrainedDefenderPolicy trained =
        train_defender(other, mix, hyper, Aggregation::desk_defender(), 5);
    save_trained_policy((dir / "other.qtbl").string(), trained.data());

    write_file(dir / "ref.cfg", "defender_policy_file = " + (dir / "other.qtbl").string() +
                                    "\ntrain_episodes_attacker = 50\n"
                                    "best_response_candidates = 1\n");
    RecipeOptions opts;
    opts.out_dir = (dir / "out").string();
    opts.runs = 2;
    opts.config_file = (dir / "ref.cfg").string();
    try {
        run_recipe("equal-budget-unbounded", opts);
        FAIL("expected RecipeError");
    } catch (const RecipeError& e) {
        CHECK(e.exit_code() == 3);
        CHECK(std::string(e.what()).find("hash mismatch") != std::string::npos);
    }
    fs::remove_all(dir);
}

TEST_CASE("theorem1-checks recipe writes the bound report") {
    const fs::path dir = fresh_dir("csoc_io_thm");
    RecipeOptions opts;
    opts.out_dir = (dir / "out").string();
    opts.runs = 60; // keep the Monte-Carlo pieces quick
    const RecipeResult result = run_recipe("theorem1-checks", opts);
    CHECK(result.name == "theorem1-checks");
    const std::string report = slurp(dir / "out" / "bounds_report.txt");
    CHECK(report.find("guaranteed_backlog = 4210") != std::string::npos);
    CHECK(report.find("absorbed = 590") != std::string::npos);
    CHECK(report.find("discrepancy surfaced") != std::string::npos);
    CHECK(report.find("tail(j) <= 1/j for j in [2,50]: yes") != std::string::npos);
    CHECK(report.find("violations = 0") != std::string::npos);
    CHECK(fs::exists(dir / "out" / "manifest.json"));
    fs::remove_all(dir);
}
