#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "mlfa/objective.hpp"

namespace mlfa {

/// Principal eigenpairs of the whitened covariance and the shrunk signal powers.
struct SubspaceUpdate {
    ComplexMatrix basis;       // N x M, orthonormal columns (U)
    RealVector signal_powers;  // M, (lambda_m - 1)_+, descending
    RealVector eigenvalues;    // all N eigenvalues of the whitened covariance
};

/// Objective value and wall time recorded after every iteration.
struct SolverTrace {
    std::vector<double> objective;
    std::vector<double> seconds;  // wall time spent in each iteration
    std::size_t iterations_run = 0;
};

/// Knobs shared by both solvers. The published experiments run a fixed
/// iteration count, so early stopping is off unless a tolerance is set.
struct SolverOptions {
    /// Stop once |f_k - f_{k-1}| < tolerance for `patience` consecutive iterations.
    std::optional<double> stop_tolerance;
    int patience = 3;
    /// Record per-iteration objective values (one extra likelihood evaluation each).
    bool record_objective = true;
};

/// Q^{-1/2} R Q^{-1/2}, i.e. entries R_ij / (sigma_i sigma_j).
HermitianMatrix whiten(const HermitianMatrix& sample_cov, const RealVector& noise_vars);

/// U = M principal eigenvectors of the whitened covariance, Lambda = (lambda - 1)_+.
/// This pair minimizes ln det(Lambda + I) + tr(Rw (U Lambda U^H + I)^{-1}).
SubspaceUpdate principal_subspace_update(const HermitianMatrix& whitened, Eigen::Index factor_count);

/// (U Lambda U^H + I)^{-1}, by direct positive-definite inversion.
HermitianMatrix gamma_matrix(const SubspaceUpdate& update);

/// One Gauss-Seidel pass over the noise standard deviations, n = 0..N-1:
///   sigma_n <- (b_n + sqrt(b_n^2 + 4 c_n)) / 2,
///   b_n = sum_{i != n} Re{R_ni Gamma_in} / sigma_i,  c_n = R_nn Gamma_nn.
/// Each update is the exact minimizer over sigma_n of
///   ln det Q + tr(Q^{-1/2} R Q^{-1/2} Gamma).
RealVector sigma_sweep(const HermitianMatrix& sample_cov, const HermitianMatrix& gamma, RealVector sigmas);

/// Loadings Q^{1/2} U Lambda^{1/2}.
ComplexMatrix loadings_from_subspace(const SubspaceUpdate& update, const RealVector& noise_vars);

/// Alternating minimization: per outer iteration, whiten with the current Q,
/// take the principal subspace update, then run `inner_sweeps` sigma sweeps
/// with Gamma held fixed. Returns S = Q^{1/2} U Lambda^{1/2} from the last
/// iteration and the objective trace.
std::pair<FactorEstimate, SolverTrace> faan_solve(const HermitianMatrix& sample_cov, Eigen::Index factor_count,
                                                  const RealVector& initial_noise_vars, int outer_iterations,
                                                  int inner_sweeps, const SolverOptions& options = {});

namespace detail {
void check_solver_inputs(const HermitianMatrix& sample_cov, Eigen::Index factor_count,
                         const RealVector& initial_noise_vars, int iterations);
bool should_stop(const SolverOptions& options, const std::vector<double>& objective, int& quiet_streak);
}  // namespace detail

}  // namespace mlfa
