#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mlfa/doa.hpp"
#include "mlfa/ecme.hpp"
#include "mlfa/faan.hpp"
#include "mlfa/model.hpp"

namespace mlfa {

enum class Method { Faan, Ecme, Both };

std::string to_string(Method method);
Method parse_method(const std::string& text);

/// One experiment run. Budgets left unset fall back to the per-command
/// defaults (1000 outer iterations for convergence and scatter, 100 for the
/// RMSE sweep, 100 inner sweeps everywhere).
struct ExperimentSpec {
    ScenarioConfig scenario = reference_scenario();
    Method method = Method::Both;
    std::optional<int> iteration_budget;
    int inner_sweeps = 100;
    int realization_count = 100;
    std::vector<Eigen::Index> snapshot_grid{50, 100, 200, 500, 1000};
    std::optional<RealVector> initial_noise_vars;  // identity when unset
    std::string output_path;
    std::string input_path;  // snapshots CSV for `estimate`
    unsigned threads = 0;  // 0 = one worker per hardware thread

    int iterations_or(int fallback) const { return iteration_budget.value_or(fallback); }
    RealVector initial_noise(Eigen::Index sensor_count) const;
    void validate() const;
};

/// Named real columns with `key=value` metadata. Metadata and columns are a
/// pure function of the spec, so serialized tables are byte-reproducible;
/// wall-clock data lives in `timings` and is only written on request.
struct ResultTable {
    std::vector<std::pair<std::string, std::string>> metadata;
    std::vector<std::string> names;
    std::vector<std::vector<double>> columns;
    std::vector<std::pair<std::string, std::vector<double>>> timings;

    void add_column(std::string name, std::vector<double> values);
    const std::vector<double>& column(const std::string& name) const;
    std::size_t row_count() const noexcept { return columns.empty() ? 0 : columns.front().size(); }

    /// `#key=value` lines, a header, then one row per entry; NaN is written as `nan`.
    void write_csv(std::ostream& out, bool include_timings = false) const;
};

/// Objective per iteration for both solvers on one shared snapshot draw.
ResultTable run_convergence(const ExperimentSpec& spec);

/// Root-MUSIC angles (degrees) per realization; both solvers see the same snapshots.
ResultTable run_scatter(const ExperimentSpec& spec);

/// Per snapshot count: per-angle RMSE for each method, the CRLB and failure counts.
ResultTable run_rmse(const ExperimentSpec& spec);

/// Solver output on externally supplied snapshots.
struct MethodEstimate {
    Method method = Method::Ecme;
    FactorEstimate estimate;
    double objective = 0.0;
    std::vector<double> thetas;       // radians, ascending; empty on failure
    std::vector<double> errors;       // against scenario truth when available
    std::optional<std::string> failure;
};

struct EstimateReport {
    Eigen::Index sensor_count = 0;
    Eigen::Index snapshot_count = 0;
    std::vector<MethodEstimate> methods;
};

EstimateReport estimate_snapshots(const SnapshotMatrix& snapshots, const ExperimentSpec& spec);
EstimateReport estimate_file(const ExperimentSpec& spec);

/// Stable 64-bit FNV-1a digest of the scenario, written into table metadata.
std::string scenario_digest(const ScenarioConfig& scenario);

}  // namespace mlfa
