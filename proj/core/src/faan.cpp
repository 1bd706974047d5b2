#include "mlfa/faan.hpp"

#include <chrono>
#include <cmath>

namespace mlfa {

namespace detail {

void check_solver_inputs(const HermitianMatrix& sample_cov, Eigen::Index factor_count,
                         const RealVector& initial_noise_vars, int iterations) {
    const Eigen::Index n = sample_cov.order();
    if (n < 2) throw InvalidInputError("sample covariance must have order at least 2");
    if (factor_count < 1 || factor_count >= n)
        throw InvalidInputError("factor count must satisfy 1 <= M < N");
    if (initial_noise_vars.size() != n) throw InvalidInputError("initial noise variances must have N entries");
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(initial_noise_vars(i) > 0.0) || !std::isfinite(initial_noise_vars(i)))
            throw DomainError("initial noise variances must be positive and finite");
    }
    if (iterations < 1) throw InvalidInputError("iteration budget must be at least 1");
    const double smallest = min_eigenvalue(sample_cov);
    if (!(smallest > 0.0)) throw SingularityError("sample covariance is not positive definite", smallest);
}

bool should_stop(const SolverOptions& options, const std::vector<double>& objective, int& quiet_streak) {
    if (!options.stop_tolerance || objective.size() < 2) return false;
    const double change = std::abs(objective.back() - objective[objective.size() - 2]);
    quiet_streak = change < *options.stop_tolerance ? quiet_streak + 1 : 0;
    return quiet_streak >= options.patience;
}

}  // namespace detail

HermitianMatrix whiten(const HermitianMatrix& sample_cov, const RealVector& noise_vars) {
    if (noise_vars.size() != sample_cov.order()) throw InvalidInputError("noise variance count mismatch");
    for (Eigen::Index i = 0; i < noise_vars.size(); ++i) {
        if (!(noise_vars(i) > 0.0)) throw DomainError("noise variances must be positive");
    }
    const Eigen::Index n = sample_cov.order();
    const RealVector sd = noise_vars.cwiseSqrt();
    ComplexMatrix w(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) w(i, j) = sample_cov(i, j) / (sd(i) * sd(j));
    }
    return HermitianMatrix::from_upper(w);
}

SubspaceUpdate principal_subspace_update(const HermitianMatrix& whitened, Eigen::Index factor_count) {
    if (factor_count < 1 || factor_count > whitened.order())
        throw InvalidInputError("factor count must lie in [1, N]");
    EigenPairs eig = hermitian_eig(whitened);
    SubspaceUpdate out;
    out.basis = eig.vectors.leftCols(factor_count);
    out.signal_powers = (eig.values.head(factor_count).array() - 1.0).cwiseMax(0.0);
    out.eigenvalues = std::move(eig.values);
    return out;
}

HermitianMatrix gamma_matrix(const SubspaceUpdate& update) {
    const Eigen::Index n = update.basis.rows();
    ComplexMatrix core = update.basis * update.signal_powers.cast<Complex>().asDiagonal() * update.basis.adjoint();
    core += ComplexMatrix::Identity(n, n);
    return pd_inverse(HermitianMatrix::from_upper(core));
}

RealVector sigma_sweep(const HermitianMatrix& sample_cov, const HermitianMatrix& gamma, RealVector sigmas) {
    const Eigen::Index n = sample_cov.order();
    if (gamma.order() != n || sigmas.size() != n) throw InvalidInputError("sigma sweep dimension mismatch");
    for (Eigen::Index k = 0; k < n; ++k) {
        double b = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (i == k) continue;
            b += (sample_cov(k, i) * gamma(i, k)).real() / sigmas(i);
        }
        const double c = sample_cov(k, k).real() * gamma(k, k).real();
        if (!(c > 0.0)) throw NumericalError("sigma sweep requires R_nn Gamma_nn > 0");
        // (b + sqrt(b^2 + 4c)) / 2 loses digits when b << 0; the product of
        // the two roots is -c, so use that form instead.
        const double root = std::sqrt(b * b + 4.0 * c);
        sigmas(k) = b >= 0.0 ? 0.5 * (b + root) : 2.0 * c / (root - b);
    }
    return sigmas;
}

ComplexMatrix loadings_from_subspace(const SubspaceUpdate& update, const RealVector& noise_vars) {
    return noise_vars.cwiseSqrt().cast<Complex>().asDiagonal() * update.basis *
           update.signal_powers.cwiseSqrt().cast<Complex>().asDiagonal();
}

std::pair<FactorEstimate, SolverTrace> faan_solve(const HermitianMatrix& sample_cov, Eigen::Index factor_count,
                                                  const RealVector& initial_noise_vars, int outer_iterations,
                                                  int inner_sweeps, const SolverOptions& options) {
    detail::check_solver_inputs(sample_cov, factor_count, initial_noise_vars, outer_iterations);
    if (inner_sweeps < 1) throw InvalidInputError("inner sweep count must be at least 1");

    using clock = std::chrono::steady_clock;
    RealVector noise_vars = initial_noise_vars;
    SolverTrace trace;
    FactorEstimate est;
    int quiet = 0;

    for (int k = 0; k < outer_iterations; ++k) {
        const auto start = clock::now();
        const SubspaceUpdate update = principal_subspace_update(whiten(sample_cov, noise_vars), factor_count);
        const HermitianMatrix gamma = gamma_matrix(update);
        RealVector sigmas = noise_vars.cwiseSqrt();
        for (int sweep = 0; sweep < inner_sweeps; ++sweep) sigmas = sigma_sweep(sample_cov, gamma, sigmas);
        noise_vars = sigmas.cwiseAbs2();
        est.noise_vars = noise_vars;
        est.loadings = loadings_from_subspace(update, noise_vars);
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
