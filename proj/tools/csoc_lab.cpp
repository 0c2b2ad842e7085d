// Experiment driver for the alert-inspection game lab.
//
// Every experiment is a named recipe that trains and/or evaluates a
// defender/attacker pairing and writes a reproducible bundle (manifest,
// trace CSVs, charts, reports) into --out. All randomness flows from --seed;
// per-run seeds derive from it by a fixed splitmix64 rule, so reruns with the
// same arguments are byte-identical regardless of --jobs.

#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "csoc/recipes.hpp"

int main(int argc, char** argv) {
    CLI::App app{"csoc_lab: adversarial cyber-alert inspection game laboratory"};

    std::string recipe;
    bool list = false;
    csoc::RecipeOptions opts;
    std::string config_file;

    app.add_option("--recipe", recipe, "named experiment to run (see --list-recipes)");
    app.add_flag("--list-recipes", list, "print the recipe catalog and exit");
    app.add_option("--config", config_file,
                   "flat key = value file overriding the base configuration");
    app.add_option("--seed", opts.seed, "master seed; all randomness derives from it")
        ->capture_default_str();
    app.add_option("--runs", opts.runs, "Monte-Carlo evaluation runs per matchup")
        ->capture_default_str();
    app.add_option("--jobs", opts.jobs, "worker threads for Monte-Carlo evaluation")
        ->capture_default_str();
    app.add_option("--out", opts.out_dir, "output directory for the report bundle")
        ->capture_default_str();
    app.add_option("--scale", opts.scale, "operating point: desk or paper")
        ->capture_default_str()
        ->check(CLI::IsMember({"desk", "paper"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (list) {
        for (const auto& r : csoc::recipe_catalog()) {
            std::printf("%-26s %s%s\n", r.name.c_str(), r.description.c_str(),
                        r.needs_training ? " [desk scale]" : "");
        }
        return 0;
    }
    if (recipe.empty()) {
        std::fprintf(stderr, "error: --recipe is required (or --list-recipes)\n");
        return 2;
    }
    if (!config_file.empty()) opts.config_file = config_file;

    try {
        const csoc::RecipeResult result = csoc::run_recipe(recipe, opts);
        std::printf("recipe %s -> %s\n", result.name.c_str(), result.out_dir.c_str());
        for (const auto& row : result.stats) {
            std::printf("  %-22s sup=%.4f bands=[%.3f %.3f %.3f %.3f] worst_max=%lld\n",
                        row.label.c_str(), row.mean_sup_cost, row.proportions[0],
                        row.proportions[1], row.proportions[2], row.proportions[3],
                        row.worst_run_max_backlog);
        }
        for (const auto& f : result.files) std::printf("  wrote %s\n", f.c_str());
        return 0;
    } catch (const csoc::RecipeError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return e.exit_code();
    } catch (const std::exception& e) {
        std::fprintf(stderr, "unexpected error: %s\n", e.what());
        return 4;
    }
}
