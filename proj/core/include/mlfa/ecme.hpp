#pragma once

#include <utility>

#include "mlfa/faan.hpp"

namespace mlfa {

/// Conditional second moments of the noise given the data and (S, Q).
///
/// With C = S S^H + Q and delta = C^{-1} Q, each snapshot's noise has
/// conditional mean delta^H y(t) and covariance Delta = Q - Q delta, so the
/// expected noise sample covariance is Rv = delta^H R delta + Delta. Only the
/// aggregate is formed; per-snapshot moments are never materialized.
struct EStepResult {
    ComplexMatrix delta;
    HermitianMatrix noise_posterior_cov;  // Delta, PSD
    HermitianMatrix expected_noise_cov;   // Rv, PD
};

/// S minimizing f(S, Q) at fixed Q: Q^{1/2} U Lambda^{1/2} from the whitened
/// principal subspace.
ComplexMatrix cm_step1(const HermitianMatrix& sample_cov, const RealVector& noise_vars, Eigen::Index factor_count);

/// Throws NumericalError if Delta fails PSD (to -1e-10 trace) or Rv fails PD.
EStepResult e_step(const HermitianMatrix& sample_cov, const ComplexMatrix& loadings, const RealVector& noise_vars);

/// Q = diag(Rv).
RealVector cm_step2(const EStepResult& e);

/// Iterates cm_step1 -> e_step -> cm_step2 from the initial variances. The
/// trace records f(S^(k), Q^(k)) after each iteration.
std::pair<FactorEstimate, SolverTrace> ecme_solve(const HermitianMatrix& sample_cov, Eigen::Index factor_count,
                                                  const RealVector& initial_noise_vars, int iterations,
                                                  const SolverOptions& options = {});

}  // namespace mlfa
