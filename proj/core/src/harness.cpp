#include "mlfa/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

namespace mlfa {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr int kDefaultLongBudget = 1000;
constexpr int kDefaultRmseBudget = 100;

bool runs_faan(Method m) { return m != Method::Ecme; }
bool runs_ecme(Method m) { return m != Method::Faan; }

// Calls body(i) for i in [0, count) on up to `threads` workers. Each index
// writes only its own output slot, so results are independent of scheduling.
template <typename Body>
void parallel_for(std::size_t count, unsigned threads, Body&& body) {
    unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(workers);
    {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t i = next++; i < count; i = next++) body(i);
                } catch (...) {
                    errors[w] = std::current_exception();
                    next = count;
                }
            });
        }
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

std::string format_double(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

void add_common_metadata(ResultTable& table, const ExperimentSpec& spec, const std::string& experiment) {
    table.metadata.emplace_back("experiment", experiment);
    table.metadata.emplace_back("seed", std::to_string(spec.scenario.rng_seed));
    table.metadata.emplace_back("method", to_string(spec.method));
    table.metadata.emplace_back("scenario_digest", scenario_digest(spec.scenario));
    table.metadata.emplace_back("sensor_count", std::to_string(spec.scenario.sensor_count));
    table.metadata.emplace_back("source_count", std::to_string(spec.scenario.source_count));
}

struct RealizationOutcome {
    std::vector<double> faan;  // radians; empty on failure
    std::vector<double> ecme;
};

std::vector<double> solve_and_locate(Method which, const HermitianMatrix& r, const ExperimentSpec& spec,
                                     int iterations, const RealVector& q0) {
    SolverOptions options;
    options.record_objective = false;
    const Eigen::Index m = spec.scenario.source_count;
    try {
        const FactorEstimate est = which == Method::Faan
                                       ? faan_solve(r, m, q0, iterations, spec.inner_sweeps, options).first
                                       : ecme_solve(r, m, q0, iterations, options).first;
        return root_music(noise_projector(est.loadings), m);
    } catch (const EstimationFailure&) {
        return {};
    } catch (const NumericalError&) {
        return {};
    } catch (const SingularityError&) {
        return {};
    }
}

RealizationOutcome run_realization(const ExperimentSpec& spec, Eigen::Index snapshots, std::size_t index,
                                   int iterations) {
    ScenarioConfig draw = spec.scenario;
    draw.snapshot_count = snapshots;
    draw.rng_seed = derive_seed(spec.scenario.rng_seed, index);
    const SampleCovariance cov = sample_covariance(generate_snapshots(draw));
    const RealVector q0 = spec.initial_noise(spec.scenario.sensor_count);

    RealizationOutcome out;
    if (!cov.positive_definite()) return out;
    if (runs_faan(spec.method)) out.faan = solve_and_locate(Method::Faan, cov.matrix, spec, iterations, q0);
    if (runs_ecme(spec.method)) out.ecme = solve_and_locate(Method::Ecme, cov.matrix, spec, iterations, q0);
    return out;
}

}  // namespace

std::string to_string(Method method) {
    switch (method) {
        case Method::Faan: return "faan";
        case Method::Ecme: return "ecme";
        case Method::Both: return "both";
    }
    return "both";
}

Method parse_method(const std::string& text) {
    if (text == "faan") return Method::Faan;
    if (text == "ecme") return Method::Ecme;
    if (text == "both") return Method::Both;
    throw InvalidInputError("unknown method '" + text + "' (expected faan, ecme or both)");
}

RealVector ExperimentSpec::initial_noise(Eigen::Index sensor_count) const {
    if (!initial_noise_vars) return RealVector::Ones(sensor_count);
    if (initial_noise_vars->size() != sensor_count)
        throw InvalidInputError("initial_noise_vars must have one entry per sensor");
    return *initial_noise_vars;
}

void ExperimentSpec::validate() const {
    scenario.validate();
    if (iteration_budget && *iteration_budget < 1) throw InvalidInputError("iteration_budget must be at least 1");
    if (inner_sweeps < 1) throw InvalidInputError("inner_sweeps must be at least 1");
    if (realization_count < 1) throw InvalidInputError("realization_count must be at least 1");
    for (Eigen::Index l : snapshot_grid) {
        if (l < scenario.sensor_count) throw InvalidInputError("snapshot_grid values must be at least sensor_count");
    }
    if (initial_noise_vars) {
        (void)initial_noise(scenario.sensor_count);
        if (!(initial_noise_vars->array() > 0.0).all())
            throw DomainError("initial_noise_vars must be positive");
    }
}

void ResultTable::add_column(std::string name, std::vector<double> values) {
    if (!columns.empty() && values.size() != row_count())
        throw InvalidInputError("column '" + name + "' length differs from the table");
    names.push_back(std::move(name));
    columns.push_back(std::move(values));
}

const std::vector<double>& ResultTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == name) return columns[i];
    }
    throw InvalidInputError("no column named '" + name + "'");
}

void ResultTable::write_csv(std::ostream& out, bool include_timings) const {
    for (const auto& [key, value] : metadata) out << '#' << key << '=' << value << '\n';
    std::vector<std::string> header = names;
    std::vector<const std::vector<double>*> cols;
    for (const auto& c : columns) cols.push_back(&c);
    if (include_timings) {
        for (const auto& [name, values] : timings) {
            if (values.size() != row_count()) continue;
            header.push_back(name);
            cols.push_back(&values);
        }
    }
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << '\n';
    for (std::size_t r = 0; r < row_count(); ++r) {
        for (std::size_t i = 0; i < cols.size(); ++i) {
            const double v = (*cols[i])[r];
            out << (i ? "," : "") << (std::isnan(v) ? std::string("nan") : format_double(v));
        }
        out << '\n';
    }
}

std::string scenario_digest(const ScenarioConfig& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&](const void* data, std::size_t size) {
        const auto* bytes = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < size; ++i) {
            h ^= bytes[i];
            h *= 0x100000001b3ULL;
        }
    };
    auto mix_int = [&](std::int64_t v) { mix(&v, sizeof v); };
    auto mix_double = [&](double v) { mix(&v, sizeof v); };
    mix_int(s.sensor_count);
    mix_int(s.source_count);
    for (double t : s.thetas) mix_double(t);
    for (Eigen::Index j = 0; j < s.source_cov.cols(); ++j) {
        for (Eigen::Index i = 0; i < s.source_cov.rows(); ++i) {
            mix_double(s.source_cov(i, j).real());
            mix_double(s.source_cov(i, j).imag());
        }
    }
    for (Eigen::Index n = 0; n < s.noise_vars.size(); ++n) mix_double(s.noise_vars(n));
    mix_int(s.snapshot_count);
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

ResultTable run_convergence(const ExperimentSpec& spec) {
    spec.validate();
    const int iterations = spec.iterations_or(kDefaultLongBudget);
    const SampleCovariance cov = sample_covariance(generate_snapshots(spec.scenario));
    const HermitianMatrix& r = cov.require_positive_definite();
    const Eigen::Index m = spec.scenario.source_count;
    const RealVector q0 = spec.initial_noise(spec.scenario.sensor_count);

    ResultTable table;
    add_common_metadata(table, spec, "convergence");
    table.metadata.emplace_back("snapshot_count", std::to_string(spec.scenario.snapshot_count));
    table.metadata.emplace_back("iteration_budget", std::to_string(iterations));
    table.metadata.emplace_back("inner_sweeps", std::to_string(spec.inner_sweeps));

    std::vector<double> index(static_cast<std::size_t>(iterations));
    for (int k = 0; k < iterations; ++k) index[static_cast<std::size_t>(k)] = k + 1;
    table.add_column("iteration", index);

    if (runs_faan(spec.method)) {
        auto [est, trace] = faan_solve(r, m, q0, iterations, spec.inner_sweeps);
        table.add_column("faan_objective", trace.objective);
        table.timings.emplace_back("faan_seconds", trace.seconds);
    }
    if (runs_ecme(spec.method)) {
        auto [est, trace] = ecme_solve(r, m, q0, iterations);
        table.add_column("ecme_objective", trace.objective);
        table.timings.emplace_back("ecme_seconds", trace.seconds);
    }
    return table;
}

ResultTable run_scatter(const ExperimentSpec& spec) {
    spec.validate();
    const int iterations = spec.iterations_or(kDefaultLongBudget);
    const auto count = static_cast<std::size_t>(spec.realization_count);
    const auto m = static_cast<std::size_t>(spec.scenario.source_count);

    std::vector<RealizationOutcome> outcomes(count);
    parallel_for(count, spec.threads, [&](std::size_t i) {
        outcomes[i] = run_realization(spec, spec.scenario.snapshot_count, i, iterations);
    });

    ResultTable table;
    add_common_metadata(table, spec, "scatter");
    table.metadata.emplace_back("snapshot_count", std::to_string(spec.scenario.snapshot_count));
    table.metadata.emplace_back("iteration_budget", std::to_string(iterations));
    table.metadata.emplace_back("inner_sweeps", std::to_string(spec.inner_sweeps));
    table.metadata.emplace_back("realization_count", std::to_string(count));

    std::vector<double> index(count);
    for (std::size_t i = 0; i < count; ++i) index[i] = static_cast<double>(i);
    table.add_column("realization", index);

    auto add_method = [&](const std::string& prefix, auto member) {
        for (std::size_t k = 0; k < m; ++k) {
            std::vector<double> col(count, kNaN);
            for (std::size_t i = 0; i < count; ++i) {
                const std::vector<double>& est = outcomes[i].*member;
                if (est.size() == m) col[i] = radians_to_degrees(est[k]);
            }
            table.add_column(prefix + "_theta" + std::to_string(k + 1) + "_deg", std::move(col));
        }
    };
    if (runs_faan(spec.method)) add_method("faan", &RealizationOutcome::faan);
    if (runs_ecme(spec.method)) add_method("ecme", &RealizationOutcome::ecme);
    return table;
}

ResultTable run_rmse(const ExperimentSpec& spec) {
    spec.validate();
    if (spec.snapshot_grid.empty()) throw InvalidInputError("snapshot_grid must not be empty");
    const int iterations = spec.iterations_or(kDefaultRmseBudget);
    const auto count = static_cast<std::size_t>(spec.realization_count);
    const auto m = static_cast<std::size_t>(spec.scenario.source_count);
    const std::vector<double>& truth = spec.scenario.thetas;

    ResultTable table;
    add_common_metadata(table, spec, "rmse");
    table.metadata.emplace_back("iteration_budget", std::to_string(iterations));
    table.metadata.emplace_back("inner_sweeps", std::to_string(spec.inner_sweeps));
    table.metadata.emplace_back("realization_count", std::to_string(count));

    std::vector<double> grid_col;
    std::vector<std::vector<double>> faan_rmse(m), ecme_rmse(m), bound(m);
    std::vector<double> faan_failures, ecme_failures;

    for (Eigen::Index snapshots : spec.snapshot_grid) {
        std::vector<RealizationOutcome> outcomes(count);
        parallel_for(count, spec.threads,
                     [&](std::size_t i) { outcomes[i] = run_realization(spec, snapshots, i, iterations); });

        auto summarize = [&](auto member, std::vector<std::vector<double>>& dest, std::vector<double>& failures) {
            std::vector<std::vector<double>> errors;
            for (const auto& o : outcomes) {
                const std::vector<double>& est = o.*member;
                if (est.size() == m) errors.push_back(match_angles(est, truth));
            }
            failures.push_back(static_cast<double>(count - errors.size()));
            const std::vector<double> per_angle =
                errors.empty() ? std::vector<double>(m, kNaN) : rmse(errors);
            for (std::size_t k = 0; k < m; ++k) dest[k].push_back(radians_to_degrees(per_angle[k]));
        };
        grid_col.push_back(static_cast<double>(snapshots));
        if (runs_faan(spec.method)) summarize(&RealizationOutcome::faan, faan_rmse, faan_failures);
        if (runs_ecme(spec.method)) summarize(&RealizationOutcome::ecme, ecme_rmse, ecme_failures);

        ScenarioConfig at_l = spec.scenario;
        at_l.snapshot_count = snapshots;
        const CrlbResult cr = crlb(at_l);
        for (std::size_t k = 0; k < m; ++k) bound[k].push_back(radians_to_degrees(cr.per_angle_std[k]));
    }

    table.add_column("snapshot_count", grid_col);
    for (std::size_t k = 0; k < m; ++k) {
        const std::string idx = std::to_string(k + 1);
        if (runs_faan(spec.method)) table.add_column("faan_rmse" + idx + "_deg", faan_rmse[k]);
        if (runs_ecme(spec.method)) table.add_column("ecme_rmse" + idx + "_deg", ecme_rmse[k]);
        table.add_column("crlb" + idx + "_deg", bound[k]);
    }
    if (runs_faan(spec.method)) table.add_column("faan_failures", faan_failures);
    if (runs_ecme(spec.method)) table.add_column("ecme_failures", ecme_failures);
    return table;
}

EstimateReport estimate_snapshots(const SnapshotMatrix& snapshots, const ExperimentSpec& spec) {
    const Eigen::Index n = snapshots.rows();
    const Eigen::Index m = spec.scenario.source_count;
    if (m < 1 || m >= n) throw InvalidInputError("source_count must satisfy 1 <= M < N for the snapshot file");
    if (snapshots.cols() < n) throw InvalidInputError("snapshot file has fewer snapshots than sensors");
    const SampleCovariance cov = sample_covariance(snapshots);
    const HermitianMatrix& r = cov.require_positive_definite();
    const int iterations = spec.iterations_or(kDefaultLongBudget);
    const RealVector q0 = spec.initial_noise(n);
    const bool has_truth = static_cast<Eigen::Index>(spec.scenario.thetas.size()) == m;

    EstimateReport report;
    report.sensor_count = n;
    report.snapshot_count = snapshots.cols();
    auto run = [&](Method which) {
        MethodEstimate out;
        out.method = which;
        auto [est, trace] = which == Method::Faan ? faan_solve(r, m, q0, iterations, spec.inner_sweeps)
                                                  : ecme_solve(r, m, q0, iterations);
        out.estimate = std::move(est);
        out.objective = trace.objective.back();
        try {
            out.thetas = root_music(noise_projector(out.estimate.loadings), m);
            if (has_truth) out.errors = match_angles(out.thetas, spec.scenario.thetas);
        } catch (const EstimationFailure& e) {
            out.failure = e.what();
        }
        report.methods.push_back(std::move(out));
    };
    if (runs_faan(spec.method)) run(Method::Faan);
    if (runs_ecme(spec.method)) run(Method::Ecme);
    return report;
}

}  // namespace mlfa
