#include <doctest.h>

#include <cstring>

#include "mlfa/numerics.hpp"
#include "test_support.hpp"

using namespace mlfa;
using namespace mlfa::testing;

namespace {

void check_phase_convention(const ComplexMatrix& vectors) {
    for (Eigen::Index k = 0; k < vectors.cols(); ++k) {
        const ComplexVector v = vectors.col(k);
        Eigen::Index p = 0;
        v.cwiseAbs().maxCoeff(&p);
        // the chosen pivot is real positive and carries (near) maximal magnitude
        bool found = false;
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            if (std::abs(v(i)) >= std::abs(v(p)) * (1 - 1e-9) && v(i).imag() == 0.0 && v(i).real() > 0.0) found = true;
        }
        CHECK(found);
    }
}

}  // namespace

TEST_CASE("HermitianMatrix storage is exactly Hermitian") {
    std::mt19937_64 rng(11);
    const ComplexMatrix a = random_complex(rng, 5, 5);
    const HermitianMatrix h = HermitianMatrix::from_upper(a);
    for (Eigen::Index i = 0; i < 5; ++i) {
        CHECK(h(i, i).imag() == 0.0);
        for (Eigen::Index j = 0; j < 5; ++j) CHECK(h(i, j) == std::conj(h(j, i)));
    }
    CHECK_THROWS_AS(HermitianMatrix::checked(a), InvalidInputError);

    ComplexMatrix bad = ComplexMatrix::Identity(3, 3);
    bad(1, 2) = Complex(std::nan(""), 0.0);
    CHECK_THROWS_AS(HermitianMatrix::from_upper(bad), InvalidInputError);
    CHECK_THROWS_AS(HermitianMatrix::from_upper(ComplexMatrix::Zero(2, 3)), InvalidInputError);
}

TEST_CASE("hermitian_eig on identity and diagonal matrices") {
    const EigenPairs id = hermitian_eig(HermitianMatrix::identity(3));
    CHECK(id.values.isApprox(RealVector::Ones(3)));
    CHECK(max_abs(id.vectors.adjoint() * id.vectors - ComplexMatrix::Identity(3, 3)) < 1e-12);
    check_phase_convention(id.vectors);

    RealVector d(2);
    d << 0.5, 5.0;
    const EigenPairs e = hermitian_eig(HermitianMatrix::diagonal(d));
    CHECK(e.values(0) == doctest::Approx(5.0));
    CHECK(e.values(1) == doctest::Approx(0.5));
    CHECK(max_abs(e.vectors.col(0) - ComplexVector::Unit(2, 1)) < 1e-14);
    CHECK(max_abs(e.vectors.col(1) - ComplexVector::Unit(2, 0)) < 1e-14);
}

TEST_CASE("hermitian_eig orders ties by dominant component index") {
    RealVector d(3);
    d << 1.0, 3.0, 3.0;
    const EigenPairs e = hermitian_eig(HermitianMatrix::diagonal(d));
    CHECK(e.values(0) == doctest::Approx(3.0));
    CHECK(e.values(2) == doctest::Approx(1.0));
    CHECK(std::abs(e.vectors(1, 0)) == doctest::Approx(1.0));
    CHECK(std::abs(e.vectors(2, 1)) == doctest::Approx(1.0));
    CHECK(std::abs(e.vectors(0, 2)) == doctest::Approx(1.0));
}

TEST_CASE("hermitian_eig reconstructs random matrices") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 20; ++trial) {
        const HermitianMatrix h = random_hermitian(rng, 6);
        const EigenPairs e = hermitian_eig(h);
        for (Eigen::Index k = 1; k < 6; ++k) CHECK(e.values(k - 1) >= e.values(k));
        CHECK(max_abs(e.vectors * e.values.cast<Complex>().asDiagonal() * e.vectors.adjoint() - h.matrix()) < 1e-10);
        CHECK(max_abs(e.vectors.adjoint() * e.vectors - ComplexMatrix::Identity(6, 6)) < 1e-10);
        const double scale = e.values.cwiseAbs().maxCoeff();
        for (Eigen::Index k = 0; k < 6; ++k) {
            const ComplexVector residual = h.matrix() * e.vectors.col(k) - e.values(k) * e.vectors.col(k);
            CHECK(residual.cwiseAbs().maxCoeff() <= 1e-9 * scale);
        }
        check_phase_convention(e.vectors);
        CHECK(e.values.sum() == doctest::Approx(h.trace()).epsilon(1e-9));
    }
}

TEST_CASE("hermitian_eig eigenvalue product matches cofactor determinant") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 10; ++trial) {
        const HermitianMatrix h = random_hermitian(rng, 4);
        const EigenPairs e = hermitian_eig(h);
        const Complex det = cofactor_det(h.matrix());
        CHECK(std::abs(det.imag()) < 1e-10 * (1 + std::abs(det)));
        CHECK(e.values.prod() == doctest::Approx(det.real()).epsilon(1e-8));
    }
}

TEST_CASE("hermitian_eig is bit-reproducible") {
    std::mt19937_64 rng(3);
    const HermitianMatrix h = random_hermitian(rng, 6);
    const EigenPairs a = hermitian_eig(h);
    const EigenPairs b = hermitian_eig(h);
    CHECK(std::memcmp(a.values.data(), b.values.data(), sizeof(double) * 6) == 0);
    CHECK(std::memcmp(a.vectors.data(), b.vectors.data(), sizeof(Complex) * 36) == 0);
}

TEST_CASE("pd_inverse") {
    CHECK(max_abs(pd_inverse(HermitianMatrix::identity(4)).matrix() - ComplexMatrix::Identity(4, 4)) < 1e-15);

    RealVector d(2);
    d << 2.0, 4.0;
    const HermitianMatrix inv = pd_inverse(HermitianMatrix::diagonal(d));
    CHECK(inv(0, 0).real() == doctest::Approx(0.5));
    CHECK(inv(1, 1).real() == doctest::Approx(0.25));
    CHECK(std::abs(inv(0, 1)) < 1e-15);

    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 20; ++trial) {
        const HermitianMatrix h = random_pd(rng, 6);
        const HermitianMatrix hi = pd_inverse(h);
        CHECK(max_abs(h.matrix() * hi.matrix() - ComplexMatrix::Identity(6, 6)) < 1e-9);
        CHECK(max_abs(pd_inverse(hi).matrix() - h.matrix()) < 1e-8);
    }
}

TEST_CASE("pd_inverse rejects indefinite input and reports the smallest eigenvalue") {
    RealVector d(3);
    d << 3.0, 1.0, -0.5;
    try {
        (void)pd_inverse(HermitianMatrix::diagonal(d));
        FAIL("expected SingularityError");
    } catch (const SingularityError& e) {
        CHECK(e.smallest_eigenvalue() == doctest::Approx(-0.5));
    }
    d << 1.0, 1.0, 0.0;
    CHECK_THROWS_AS(pd_inverse(HermitianMatrix::diagonal(d)), SingularityError);
}

TEST_CASE("polynomial_roots on factored polynomials") {
    const std::vector<Complex> minus_one{-1.0, 0.0, 1.0};
    const auto r1 = polynomial_roots(minus_one);
    CHECK(pairing_distance(r1, {1.0, -1.0}) < 1e-12);

    const std::vector<Complex> plus_one{1.0, 0.0, 1.0};
    const auto r2 = polynomial_roots(plus_one);
    CHECK(pairing_distance(r2, {Complex(0, 1), Complex(0, -1)}) < 1e-12);

    const std::vector<Complex> degenerate{1.0, 2.0, 0.0};
    CHECK_THROWS_AS(polynomial_roots(degenerate), DegreeError);
    const std::vector<Complex> constant{1.0};
    CHECK_THROWS_AS(polynomial_roots(constant), DegreeError);
}

TEST_CASE("polynomial_roots residuals and scale invariance on random polynomials") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Complex> c(11);
        for (auto& x : c) x = Complex(g(rng), g(rng));
        double scale = 0.0;
        for (const auto& x : c) scale = std::max(scale, std::abs(x));

        const auto roots = polynomial_roots(c);
        REQUIRE(roots.size() == 10);
        for (const Complex& z : roots) CHECK(std::abs(evaluate_polynomial(c, z)) <= 1e-7 * scale);

        const Complex alpha(g(rng), g(rng));
        std::vector<Complex> scaled = c;
        for (auto& x : scaled) x *= alpha;
        CHECK(pairing_distance(roots, polynomial_roots(scaled)) < 1e-6);
    }
}
