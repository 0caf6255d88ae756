// Command-line driver for the three experiment batches.

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "shellvi/experiments.hpp"

namespace {

void add_common_options(CLI::App* sub, shellvi::ExperimentConfig& cfg, std::string& config_path)
{
    sub->add_option("--mesh-level", cfg.mesh_level, "refinements applied to the base mesh");
    sub->add_option("--base-h", cfg.base_h, "target diameter of the level-0 mesh");
    sub->add_option("--kappa0", cfg.kappa0, "initial penalty parameter");
    sub->add_option("--shrink", cfg.shrink, "penalty reduction factor per continuation step");
    sub->add_option("--stop-tol", cfg.stop_tol, "Cauchy-error stopping threshold");
    sub->add_option("--q-exp", cfg.q_exp, "exponent in the kappa = h^q coupling");
    sub->add_option("--max-pairs", cfg.max_pairs, "cap on nested-mesh iterations");
    sub->add_option("--max-kappa-steps", cfg.max_kappa_steps, "cap on continuation steps");
    sub->add_option("--ell", cfg.ell, "load indices for the contact batch")->delimiter(',');
    sub->add_option("--newton-tol", cfg.newton_tol, "Newton residual tolerance");
    sub->add_option("--newton-max-iter", cfg.newton_max_iter, "Newton iteration cap");
    sub->add_option("--contact-tol", cfg.contact_tol, "contact detection tolerance");
    sub->add_option("--out", cfg.out_dir, "output directory");
    sub->add_option("--config", config_path, "flat key=value config file (flags override)");
}

} // namespace

int main(int argc, char** argv)
{
    shellvi::ExperimentConfig cfg;
    std::string config_path;

    // the config file seeds the defaults, so flags parsed afterwards win
    for (int i = 1; i + 1 < argc; ++i)
        if (std::string(argv[i]) == "--config")
            config_path = argv[i + 1];
    try {
        if (!config_path.empty())
            shellvi::apply_config_file(config_path, cfg);
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }

    CLI::App app{"doubly-penalised shell obstacle experiments"};
    app.require_subcommand(1);
    std::string ignored;
    auto* b1 = app.add_subcommand("batch1", "penalty continuation at a fixed mesh");
    auto* b2 = app.add_subcommand("batch2", "nested-mesh convergence under kappa = h^q");
    auto* b3 = app.add_subcommand("batch3", "contact-area growth under increasing load");
    add_common_options(b1, cfg, ignored);
    add_common_options(b2, cfg, ignored);
    add_common_options(b3, cfg, ignored);

    CLI11_PARSE(app, argc, argv);

    try {
        if (b1->parsed()) {
            cfg.batch = 1;
            const auto rows = shellvi::run_batch1(cfg);
            std::printf("batch1: %zu continuation pairs, final error %.3e\n", rows.size(),
                        rows.empty() ? 0.0 : rows.back().cauchy_error);
        } else if (b2->parsed()) {
            cfg.batch = 2;
            const auto result = shellvi::run_batch2(cfg);
            std::printf("batch2: stopped=%d after %d iterations, final error %.3e\n",
                        int(result.stopped), result.iterations,
                        result.rows.empty() ? 0.0 : result.rows.back().error);
        } else {
            cfg.batch = 3;
            const auto rows = shellvi::run_batch3(cfg);
            for (const auto& r : rows)
                std::printf("batch3: ell=%d contact_area=%.6e\n", r.ell, r.contact);
        }
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
    return 0;
}
