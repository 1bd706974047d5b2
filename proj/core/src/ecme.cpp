#include "mlfa/ecme.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

namespace mlfa {

ComplexMatrix cm_step1(const HermitianMatrix& sample_cov, const RealVector& noise_vars, Eigen::Index factor_count) {
    const SubspaceUpdate update = principal_subspace_update(whiten(sample_cov, noise_vars), factor_count);
    return loadings_from_subspace(update, noise_vars);
}

EStepResult e_step(const HermitianMatrix& sample_cov, const ComplexMatrix& loadings, const RealVector& noise_vars) {
    const FactorEstimate current{loadings, noise_vars};
    const HermitianMatrix c_inv = pd_inverse(assemble_covariance(current));
    const auto q = noise_vars.cast<Complex>().asDiagonal();

    EStepResult out;
    out.delta = c_inv.matrix() * q;
    out.noise_posterior_cov = HermitianMatrix::from_upper(ComplexMatrix(q) - q * out.delta);
    out.expected_noise_cov = HermitianMatrix::from_upper(out.delta.adjoint() * sample_cov.matrix() * out.delta +
                                                         out.noise_posterior_cov.matrix());

    const double delta_floor = -1e-10 * std::max(1.0, std::abs(out.noise_posterior_cov.trace()));
    const double delta_min = min_eigenvalue(out.noise_posterior_cov);
    if (delta_min < delta_floor) {
        std::ostringstream os;
        os << "noise posterior covariance is not PSD (smallest eigenvalue " << delta_min << ")";
        throw NumericalError(os.str());
    }
    const double rv_min = min_eigenvalue(out.expected_noise_cov);
    if (!(rv_min > 0.0)) {
        std::ostringstream os;
        os << "expected noise covariance is not PD (smallest eigenvalue " << rv_min << ")";
        throw NumericalError(os.str());
    }
    return out;
}

RealVector cm_step2(const EStepResult& e) {
    RealVector vars = e.expected_noise_cov.real_diagonal();
    for (Eigen::Index n = 0; n < vars.size(); ++n) {
        if (!(vars(n) > 0.0) || !std::isfinite(vars(n)))
            throw NumericalError("expected noise covariance has a non-positive diagonal entry");
    }
    return vars;
}

std::pair<FactorEstimate, SolverTrace> ecme_solve(const HermitianMatrix& sample_cov, Eigen::Index factor_count,
                                                  const RealVector& initial_noise_vars, int iterations,
                                                  const SolverOptions& options) {
    detail::check_solver_inputs(sample_cov, factor_count, initial_noise_vars, iterations);

    using clock = std::chrono::steady_clock;
    FactorEstimate est{ComplexMatrix::Zero(sample_cov.order(), factor_count), initial_noise_vars};
    SolverTrace trace;
    int quiet = 0;

    for (int k = 0; k < iterations; ++k) {
        const auto start = clock::now();
        est.loadings = cm_step1(sample_cov, est.noise_vars, factor_count);
        est.noise_vars = cm_step2(e_step(sample_cov, est.loadings, est.noise_vars));
        trace.seconds.push_back(std::chrono::duration<double>(clock::now() - start).count());
        ++trace.iterations_run;

        if (options.record_objective || options.stop_tolerance) {
            trace.objective.push_back(negative_llf(est, sample_cov));
            if (detail::should_stop(options, trace.objective, quiet)) break;
        }
    }
    if (!options.record_objective) trace.objective.clear();
    return {std::move(est), std::move(trace)};
}

}  // namespace mlfa
