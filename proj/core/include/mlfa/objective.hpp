#pragma once

#include "mlfa/numerics.hpp"

namespace mlfa {

/// Factor-analysis parameters: C = S S^H + diag(noise_vars).
struct FactorEstimate {
    ComplexMatrix loadings;  // N x M
    RealVector noise_vars;   // N, strictly positive

    Eigen::Index sensor_count() const noexcept { return noise_vars.size(); }
    Eigen::Index factor_count() const noexcept { return loadings.cols(); }

    /// Throws on shape mismatch, non-finite loadings or non-positive variances.
    void validate() const;
};

HermitianMatrix assemble_covariance(const FactorEstimate& est);

/// f(S, Q) = ln det C + tr(R C^{-1}), C = S S^H + Q.
///
/// Evaluated in whitened coordinates C = Q^{1/2} (W + I) Q^{1/2} with
/// W = Q^{-1/2} S S^H Q^{-1/2}: the log-determinant is a sum of log-eigenvalues
/// of W + I (all >= 1) plus sum(ln q_n), so small noise variances do not cost
/// accuracy.
double negative_llf(const FactorEstimate& est, const HermitianMatrix& sample_cov);

/// Max-abs central finite-difference gradient of negative_llf over the real
/// parameters (Re/Im of every loading, every noise variance), with step
/// h = 1e-5 (1 + |p|).
double stationarity_residual(const FactorEstimate& est, const HermitianMatrix& sample_cov);

}  // namespace mlfa
