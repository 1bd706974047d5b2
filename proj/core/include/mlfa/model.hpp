#pragma once

#include <cstdint>
#include <vector>

#include "mlfa/numerics.hpp"

namespace mlfa {

/// Ground truth for a uniform linear array with half-wavelength spacing.
/// Angles are radians in (0, pi).
struct ScenarioConfig {
    Eigen::Index sensor_count = 0;
    Eigen::Index source_count = 0;
    std::vector<double> thetas;
    ComplexMatrix source_cov;
    RealVector noise_vars;
    Eigen::Index snapshot_count = 0;
    std::uint64_t rng_seed = 0;

    /// Throws InvalidInputError / DomainError describing the first violated
    /// invariant (M < N, L >= N, positive noise, PSD source covariance, ...).
    void validate() const;
};

/// The setup used for the published convergence, scatter and RMSE figures:
/// N = 6, M = 2, P = 10 I, Q = diag{10, 2, 3, 2, 1, 3}, theta = (60, 120) deg.
ScenarioConfig reference_scenario(Eigen::Index snapshot_count = 100, std::uint64_t seed = 1);

/// Snapshots y(t) stored as columns.
using SnapshotMatrix = ComplexMatrix;

/// R = (1/L) sum_t y(t) y(t)^H together with its positive-definiteness diagnostics.
struct SampleCovariance {
    HermitianMatrix matrix;
    double smallest_eigenvalue = 0.0;
    bool fewer_snapshots_than_sensors = false;

    bool positive_definite() const noexcept { return smallest_eigenvalue > 0.0; }

    /// Throws SingularityError when the matrix cannot drive a solver.
    const HermitianMatrix& require_positive_definite() const;
};

/// exp(-j n pi cos(theta)), n = 0..N-1.
ComplexVector steering_vector(double theta, Eigen::Index sensor_count);

/// Columns are steering vectors of `thetas`.
ComplexMatrix manifold(std::span<const double> thetas, Eigen::Index sensor_count);

/// C = A P A^H + Q for the configured truth.
HermitianMatrix true_covariance(const ScenarioConfig& config);

/// y(t) = A s(t) + v(t) with s ~ CN(0, P), v ~ CN(0, Q), seeded by config.rng_seed.
SnapshotMatrix generate_snapshots(const ScenarioConfig& config);

SampleCovariance sample_covariance(const SnapshotMatrix& snapshots);

/// Per-realization seed: master seed mixed with the realization index
/// through a splitmix64 finalizer.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept;

/// Principal square root of a Hermitian PSD matrix; negative eigenvalues
/// within round-off are clamped to zero.
ComplexMatrix psd_sqrt(const HermitianMatrix& h);

double degrees_to_radians(double degrees) noexcept;
double radians_to_degrees(double radians) noexcept;

}  // namespace mlfa
