#include "mlfa/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace mlfa {

namespace {

bool all_finite(const ComplexMatrix& m) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) return false;
        }
    }
    return true;
}

// First index whose magnitude is within a relative 1e-10 of the column maximum;
// the slack keeps the choice stable when several components tie in modulus.
Eigen::Index dominant_index(const ComplexVector& v) {
    const double peak = v.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (std::abs(v(i)) >= peak * (1.0 - 1e-10)) return i;
    }
    return 0;
}

}  // namespace

HermitianMatrix::HermitianMatrix(Eigen::Index order) : m_(ComplexMatrix::Zero(order, order)) {}

HermitianMatrix HermitianMatrix::from_upper(const ComplexMatrix& m) {
    if (m.rows() != m.cols()) throw InvalidInputError("Hermitian matrix must be square");
    if (!all_finite(m)) throw InvalidInputError("Hermitian matrix has non-finite entries");
    HermitianMatrix h;
    h.m_ = m;
    const Eigen::Index n = m.rows();
    for (Eigen::Index i = 0; i < n; ++i) {
        h.m_(i, i) = Complex(m(i, i).real(), 0.0);
        for (Eigen::Index j = i + 1; j < n; ++j) h.m_(j, i) = std::conj(m(i, j));
    }
    return h;
}

HermitianMatrix HermitianMatrix::checked(const ComplexMatrix& m, double tolerance) {
    if (m.rows() != m.cols()) throw InvalidInputError("Hermitian matrix must be square");
    if (!all_finite(m)) throw InvalidInputError("Hermitian matrix has non-finite entries");
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    const double skew = (m - m.adjoint()).cwiseAbs().maxCoeff();
    if (skew > tolerance * scale) {
        std::ostringstream os;
        os << "matrix is not Hermitian (max |H - H^H| = " << skew << ")";
        throw InvalidInputError(os.str());
    }
    return from_upper(m);
}

HermitianMatrix HermitianMatrix::identity(Eigen::Index order) {
    HermitianMatrix h;
    h.m_ = ComplexMatrix::Identity(order, order);
    return h;
}

HermitianMatrix HermitianMatrix::diagonal(const RealVector& d) {
    if (!d.allFinite()) throw InvalidInputError("diagonal has non-finite entries");
    HermitianMatrix h(d.size());
    for (Eigen::Index i = 0; i < d.size(); ++i) h.m_(i, i) = d(i);
    return h;
}

EigenPairs hermitian_eig(const HermitianMatrix& h) {
    const Eigen::Index n = h.order();
    if (n == 0) return {};
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h.matrix());
    if (solver.info() != Eigen::Success) throw NumericalError("Hermitian eigensolver did not converge");

    const RealVector& raw_values = solver.eigenvalues();
    ComplexMatrix raw_vectors = solver.eigenvectors();

    std::vector<Eigen::Index> dominant(static_cast<std::size_t>(n));
    for (Eigen::Index k = 0; k < n; ++k) {
        ComplexVector v = raw_vectors.col(k);
        const Eigen::Index p = dominant_index(v);
        dominant[static_cast<std::size_t>(k)] = p;
        const Complex phase = std::conj(v(p)) / std::abs(v(p));
        raw_vectors.col(k) = v * phase;
        raw_vectors(p, k) = Complex(raw_vectors(p, k).real(), 0.0);
    }

    const double spread = std::max(1.0, raw_values.cwiseAbs().maxCoeff());
    const double tie = 1e-12 * spread;

    // Descending order; ties broken by dominant component index.
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::reverse(order.begin(), order.end());
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        if (std::abs(raw_values(a) - raw_values(b)) > tie) return raw_values(a) > raw_values(b);
        return dominant[static_cast<std::size_t>(a)] < dominant[static_cast<std::size_t>(b)];
    });

    EigenPairs out;
    out.values.resize(n);
    out.vectors.resize(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const Eigen::Index src = order[static_cast<std::size_t>(k)];
        out.values(k) = raw_values(src);
        out.vectors.col(k) = raw_vectors.col(src);
    }
    return out;
}

double min_eigenvalue(const HermitianMatrix& h) {
    if (h.order() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h.matrix(), Eigen::EigenvaluesOnly);
    return solver.eigenvalues()(0);
}

HermitianMatrix pd_inverse(const HermitianMatrix& h) {
    const EigenPairs eig = hermitian_eig(h);
    const Eigen::Index n = h.order();
    if (n == 0) return h;
    const double largest = eig.values(0);
    const double smallest = eig.values(n - 1);
    if (!(largest > 0.0) || !(smallest > 1e-12 * largest)) {
        std::ostringstream os;
        os << "matrix is not positive definite (smallest eigenvalue " << smallest << ", largest "
           << largest << ")";
        throw SingularityError(os.str(), smallest);
    }
    const ComplexMatrix scaled = eig.vectors * eig.values.cwiseInverse().asDiagonal();
    return HermitianMatrix::from_upper(scaled * eig.vectors.adjoint());
}

Complex evaluate_polynomial(std::span<const Complex> coeffs, Complex z) {
    Complex acc{0.0, 0.0};
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * z + *it;
    return acc;
}

std::vector<Complex> polynomial_roots(std::span<const Complex> coeffs) {
    if (coeffs.size() < 2) throw DegreeError("polynomial degree must be at least 1");
    const std::size_t degree = coeffs.size() - 1;
    const Complex lead = coeffs[degree];
    if (lead == Complex{0.0, 0.0}) throw DegreeError("leading polynomial coefficient is zero");
    for (const Complex& c : coeffs) {
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
            throw InvalidInputError("polynomial coefficient is not finite");
    }

    const auto d = static_cast<Eigen::Index>(degree);
    ComplexMatrix companion = ComplexMatrix::Zero(d, d);
    for (Eigen::Index i = 1; i < d; ++i) companion(i, i - 1) = 1.0;
    for (Eigen::Index i = 0; i < d; ++i) companion(i, d - 1) = -coeffs[static_cast<std::size_t>(i)] / lead;

    Eigen::ComplexEigenSolver<ComplexMatrix> solver(companion, false);
    if (solver.info() != Eigen::Success) throw NumericalError("companion eigensolver did not converge");

    std::vector<Complex> derivative(degree);
    for (std::size_t k = 1; k <= degree; ++k) derivative[k - 1] = coeffs[k] * static_cast<double>(k);

    std::vector<Complex> roots(degree);
    for (Eigen::Index i = 0; i < d; ++i) {
        Complex z = solver.eigenvalues()(i);
        Complex value = evaluate_polynomial(coeffs, z);
        for (int step = 0; step < 3; ++step) {
            const Complex slope = evaluate_polynomial(derivative, z);
            if (std::abs(slope) == 0.0) break;
            const Complex candidate = z - value / slope;
            const Complex candidate_value = evaluate_polynomial(coeffs, candidate);
            if (!(std::abs(candidate_value) < std::abs(value))) break;
            z = candidate;
            value = candidate_value;
        }
        roots[static_cast<std::size_t>(i)] = z;
    }
    return roots;
}

}  // namespace mlfa
