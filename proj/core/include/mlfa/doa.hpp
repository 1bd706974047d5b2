#pragma once

#include <vector>

#include "mlfa/model.hpp"

namespace mlfa {

/// Orthogonal projector onto the estimated noise subspace.
struct NoiseProjector {
    HermitianMatrix matrix;
    Eigen::Index rank = 0;
    /// Set when the loadings do not span M dimensions, so the split between
    /// signal and noise eigenvectors is not unique.
    bool rank_deficient = false;
};

/// Pi = Un Un^H, Un = eigenvectors of S S^H for its N - M smallest eigenvalues.
NoiseProjector noise_projector(const ComplexMatrix& loadings);

/// Raised when fewer than M usable roots lie inside the unit circle.
class EstimationFailure : public Error {
public:
    EstimationFailure(const std::string& what, std::vector<double> partial)
        : Error(what), partial_(std::move(partial)) {}

    const std::vector<double>& partial_estimates() const noexcept { return partial_; }

private:
    std::vector<double> partial_;
};

/// Root-MUSIC for the half-wavelength ULA: roots the polynomial with
/// coefficients c_k = sum_{q-p=k} Pi_pq, k = -(N-1)..N-1, pairs each root with
/// its conjugate reciprocal, keeps the M inside-circle representatives of
/// largest modulus and maps z to arccos(-arg(z)/pi). Angles in radians, ascending.
std::vector<double> root_music(const NoiseProjector& projector, Eigen::Index source_count);

/// Coefficients of z^{N-1} a(z)^H Pi a(z) in ascending powers of z.
std::vector<Complex> root_music_polynomial(const HermitianMatrix& projector);

/// Greedy nearest-neighbour matching; returns estimate - truth in truth order.
std::vector<double> match_angles(std::span<const double> estimates, std::span<const double> truth);

/// Per-angle root mean square over realizations; errors[r][m].
std::vector<double> rmse(const std::vector<std::vector<double>>& errors);

/// Real chart used for off-diagonal source covariance entries in the Fisher
/// information. The angle bound does not depend on the choice.
enum class OffDiagonalChart { RealImaginary, ModulusPhase };

/// Model covariance C(phi) and its partial derivatives for the parameter
/// vector phi = (theta_1..theta_M, source covariance chart, sigma_1^2..sigma_N^2).
struct CovarianceModel {
    explicit CovarianceModel(const ScenarioConfig& config, OffDiagonalChart chart = OffDiagonalChart::RealImaginary);

    Eigen::Index parameter_count() const noexcept { return parameters_.size(); }
    const RealVector& parameters() const noexcept { return parameters_; }

    ComplexMatrix covariance(const RealVector& phi) const;
    std::vector<ComplexMatrix> derivatives(const RealVector& phi) const;

private:
    ComplexMatrix source_cov(const RealVector& phi) const;

    Eigen::Index sensors_;
    Eigen::Index sources_;
    OffDiagonalChart chart_;
    RealVector parameters_;
};

struct CrlbResult {
    std::vector<double> per_angle_std;  // radians
};

/// Stochastic-signal bound from FIM_ij = L tr(C^{-1} dC_i C^{-1} dC_j) over the
/// full parameter vector; the result is the square root of the angle block
/// diagonal of FIM^{-1}. Throws SingularityError when the FIM is singular.
CrlbResult crlb(const ScenarioConfig& config, OffDiagonalChart chart = OffDiagonalChart::RealImaginary);

/// Fisher information matrix (exposed for diagnostics and tests).
RealMatrix fisher_information(const ScenarioConfig& config, OffDiagonalChart chart = OffDiagonalChart::RealImaginary);

}  // namespace mlfa
