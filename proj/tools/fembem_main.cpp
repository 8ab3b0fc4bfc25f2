// Experiment runner: convergence studies on the L-shape and the capacitor
// demo, driven by command line flags plus an optional key=value config file.

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "fembem/experiments.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Non-symmetric FEM-BEM coupling for parabolic-elliptic interface problems"};
    app.require_subcommand(1);

    CLI::App* run = app.add_subcommand("run", "run an experiment");
    std::string experiment = "smooth";
    std::string scheme = "euler";
    std::string config_path;
    std::string out_dir;
    int levels = 4;
    bool print_slopes = false;
    run->add_option("--experiment", experiment,
                    "smooth | corner | time_singular | capacitor");
    run->add_option("--levels", levels, "study: rows; capacitor: refinements");
    run->add_option("--scheme", scheme, "euler | cn")
        ->check(CLI::IsMember({"euler", "cn"}));
    run->add_option("--config", config_path, "key=value config file");
    run->add_option("--out", out_dir, "output directory")->required();
    run->add_flag("--print-slopes", print_slopes, "print log-log slope summary");

    CLI11_PARSE(app, argc, argv);

    try {
        fembem::ExperimentConfig cfg;
        const bool have_config = !config_path.empty();
        if (have_config) cfg = fembem::parse_config_file(config_path, cfg);
        // command line overrides the config file
        if (!have_config || run->count("--experiment"))
            cfg.experiment = fembem::experiment_from_string(experiment);
        if (!have_config || run->count("--levels")) cfg.levels = levels;
        if (!have_config || run->count("--scheme"))
            cfg.scheme = (scheme == "cn") ? fembem::WeightVariant::CrankNicolson
                                          : fembem::WeightVariant::Euler;
        cfg.out_dir = out_dir;

        if (cfg.experiment == fembem::ExperimentKind::Capacitor) {
            fembem::CapacitorResult result = fembem::run_capacitor(cfg);
            std::cout << "capacitor: " << result.files.size() << " snapshot files in "
                      << cfg.out_dir << "\n";
            std::cout << "  antisymmetry defect " << result.antisymmetry_defect << " (max|u| "
                      << result.max_abs_u << ")\n";
            if (result.skipped_points)
                std::cout << "  " << result.skipped_points
                          << " grid points inside the domain skipped\n";
        } else {
            fembem::ErrorReport report = fembem::run_experiment(cfg);
            std::cout << "wrote " << cfg.out_dir << "/" << fembem::to_string(cfg.experiment)
                      << ".dat (" << report.rows.size() << " levels)\n";
            if (print_slopes) std::cout << fembem::format_eoc_summary(report);
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
