// mlfa: signal subspace estimation by maximum-likelihood factor analysis.
//
//   mlfa convergence --config cfg.json --out conv.csv
//   mlfa scatter     --config cfg.json --out scatter.csv --seed 7
//   mlfa rmse        --config cfg.json --out rmse.csv
//   mlfa estimate    --config cfg.json --out estimate.json
//   mlfa simulate    --config cfg.json --out snapshots.csv

#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "mlfa/harness.hpp"
#include "mlfa/io.hpp"

namespace {

struct CommonArgs {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    bool timing = false;
};

mlfa::ExperimentSpec load(const CommonArgs& args) {
    mlfa::ExperimentSpec spec = args.config.empty() ? mlfa::ExperimentSpec{} : mlfa::load_experiment_spec(args.config);
    if (args.seed) spec.scenario.rng_seed = *args.seed;
    if (!args.out.empty()) spec.output_path = args.out;
    return spec;
}

void emit(const std::string& path, const std::function<void(std::ostream&)>& writer) {
    if (path.empty() || path == "-") {
        writer(std::cout);
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw mlfa::InvalidInputError("cannot write '" + path + "'");
    writer(out);
    if (!out) throw mlfa::InvalidInputError("failed writing '" + path + "'");
}

CLI::App* add_command(CLI::App& app, const std::string& name, const std::string& help, CommonArgs& args) {
    CLI::App* cmd = app.add_subcommand(name, help);
    cmd->add_option("--config", args.config, "JSON experiment config")->check(CLI::ExistingFile);
    cmd->add_option("--out", args.out, "Output path ('-' for stdout); overrides output_path");
    cmd->add_option("--seed", args.seed, "Override scenario.rng_seed");
    return cmd;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Signal subspace estimation by maximum-likelihood factor analysis (FAAN and ECME)"};
    app.require_subcommand(1);

    CommonArgs args;
    CLI::App* convergence = add_command(app, "convergence", "Objective per iteration for FAAN and ECME", args);
    convergence->add_flag("--timing", args.timing, "Append per-iteration wall-time columns (not reproducible)");
    CLI::App* scatter = add_command(app, "scatter", "Root-MUSIC estimates per Monte-Carlo realization", args);
    CLI::App* rmse = add_command(app, "rmse", "RMSE versus snapshot count with the CRLB", args);
    CLI::App* estimate = add_command(app, "estimate", "Fit a snapshots CSV and estimate directions", args);
    CLI::App* simulate = add_command(app, "simulate", "Write synthetic snapshots for the configured scenario", args);

    CLI11_PARSE(app, argc, argv);

    try {
        const mlfa::ExperimentSpec spec = load(args);
        if (convergence->parsed()) {
            const auto table = mlfa::run_convergence(spec);
            emit(spec.output_path, [&](std::ostream& os) { table.write_csv(os, args.timing); });
        } else if (scatter->parsed()) {
            const auto table = mlfa::run_scatter(spec);
            emit(spec.output_path, [&](std::ostream& os) { table.write_csv(os); });
        } else if (rmse->parsed()) {
            const auto table = mlfa::run_rmse(spec);
            emit(spec.output_path, [&](std::ostream& os) { table.write_csv(os); });
        } else if (estimate->parsed()) {
            const auto report = mlfa::estimate_file(spec);
            emit(spec.output_path, [&](std::ostream& os) { mlfa::write_estimate_json(os, report); });
        } else if (simulate->parsed()) {
            const auto snapshots = mlfa::generate_snapshots(spec.scenario);
            emit(spec.output_path, [&](std::ostream& os) { mlfa::write_snapshots_csv(os, snapshots); });
        }
    } catch (const mlfa::Error& e) {
        std::cerr << "mlfa: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
