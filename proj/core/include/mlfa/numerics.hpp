#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "mlfa/error.hpp"

namespace mlfa {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

/// Square complex matrix that is exactly Hermitian.
///
/// Construction copies the upper triangle onto the lower one (conjugated) and
/// zeroes the imaginary part of the diagonal, so entry(i,j) == conj(entry(j,i))
/// holds bit-for-bit regardless of round-off in the producer.
class HermitianMatrix {
public:
    HermitianMatrix() = default;
    explicit HermitianMatrix(Eigen::Index order);

    /// Symmetrizes from the upper triangle. Throws InvalidInputError if the
    /// input is not square or has non-finite entries.
    static HermitianMatrix from_upper(const ComplexMatrix& m);

    /// Like from_upper, but first checks that m is Hermitian to
    /// `tolerance` relative to its largest entry.
    static HermitianMatrix checked(const ComplexMatrix& m, double tolerance = 1e-10);

    static HermitianMatrix identity(Eigen::Index order);
    static HermitianMatrix diagonal(const RealVector& d);

    Eigen::Index order() const noexcept { return m_.rows(); }
    Complex operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }
    const ComplexMatrix& matrix() const noexcept { return m_; }
    RealVector real_diagonal() const { return m_.diagonal().real(); }
    double trace() const { return m_.diagonal().real().sum(); }

private:
    ComplexMatrix m_;
};

/// Eigenvalues sorted descending and matching orthonormal eigenvectors (columns).
struct EigenPairs {
    RealVector values;
    ComplexMatrix vectors;
};

/// Hermitian eigendecomposition with a deterministic output convention:
///  - eigenvalues are sorted descending;
///  - numerically tied eigenvalues are ordered by the index of their
///    eigenvector's largest-magnitude component, ascending;
///  - each eigenvector is scaled so its largest-magnitude component is real
///    and positive.
EigenPairs hermitian_eig(const HermitianMatrix& h);

/// Inverse of a Hermitian positive-definite matrix. Throws SingularityError
/// (carrying the smallest eigenvalue) unless every eigenvalue exceeds
/// 1e-12 times the largest.
HermitianMatrix pd_inverse(const HermitianMatrix& h);

/// Smallest eigenvalue; convenience for PD/PSD checks.
double min_eigenvalue(const HermitianMatrix& h);

/// All roots of c[0] + c[1] z + ... + c[d] z^d (ascending coefficient order),
/// computed as eigenvalues of the companion matrix of the monic polynomial
/// and refined with a Newton step where that reduces the residual.
/// Throws DegreeError when d < 1 or c[d] == 0.
std::vector<Complex> polynomial_roots(std::span<const Complex> coeffs);

/// Horner evaluation, ascending coefficient order.
Complex evaluate_polynomial(std::span<const Complex> coeffs, Complex z);

}  // namespace mlfa
