#include <doctest.h>

#include <algorithm>
#include <cstring>
#include <numeric>
#include <numbers>

#include "mlfa/model.hpp"
#include "test_support.hpp"

using namespace mlfa;
using namespace mlfa::testing;
using std::numbers::pi;

TEST_CASE("steering_vector examples") {
    const ComplexVector broadside = steering_vector(pi / 2, 4);
    CHECK(max_abs(broadside - ComplexVector::Ones(4)) < 1e-15);

    const ComplexVector a = steering_vector(pi / 3, 2);
    CHECK(std::abs(a(0) - Complex(1, 0)) < 1e-15);
    CHECK(std::abs(a(1) - Complex(0, -1)) < 1e-15);

    const ComplexVector b = steering_vector(2 * pi / 3, 3);
    CHECK(std::abs(b(1) - Complex(0, 1)) < 1e-15);
    CHECK(std::abs(b(2) - Complex(-1, 0)) < 1e-14);

    CHECK_THROWS_AS(steering_vector(0.0, 3), DomainError);
    CHECK_THROWS_AS(steering_vector(pi, 3), DomainError);
    CHECK_THROWS_AS(steering_vector(-0.2, 3), DomainError);
}

TEST_CASE("steering vectors have unit-modulus entries") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.01, pi - 0.01);
    for (int i = 0; i < 50; ++i) {
        const ComplexVector a = steering_vector(u(rng), 9);
        CHECK(a(0) == Complex(1.0, 0.0));
        CHECK(a.squaredNorm() == doctest::Approx(9.0).epsilon(1e-14));
        for (Eigen::Index n = 0; n < 9; ++n) CHECK(std::abs(a(n)) == doctest::Approx(1.0).epsilon(1e-15));
    }
}

TEST_CASE("manifold examples") {
    const std::vector<double> one{pi / 2};
    CHECK(max_abs(manifold(one, 2) - ComplexMatrix::Ones(2, 1)) < 1e-15);

    const std::vector<double> two{pi / 3, 2 * pi / 3};
    const ComplexMatrix a = manifold(two, 2);
    CHECK(std::abs(a(1, 0) - Complex(0, -1)) < 1e-15);
    CHECK(std::abs(a(1, 1) - Complex(0, 1)) < 1e-15);

    const ScenarioConfig reference = reference_scenario();
    const ComplexMatrix ap = manifold(reference.thetas, 6);
    CHECK(ap.rows() == 6);
    CHECK(ap.cols() == 2);
    CHECK(max_abs(ap.col(0) - ap.col(1).conjugate()) < 1e-14);
}

TEST_CASE("ScenarioConfig validation") {
    ScenarioConfig c = reference_scenario();
    CHECK_NOTHROW(c.validate());

    ScenarioConfig few = c;
    few.snapshot_count = 5;
    CHECK_THROWS_AS(few.validate(), InvalidInputError);

    ScenarioConfig many_sources = c;
    many_sources.source_count = 6;
    CHECK_THROWS_AS(many_sources.validate(), InvalidInputError);

    ScenarioConfig bad_noise = c;
    bad_noise.noise_vars(3) = 0.0;
    CHECK_THROWS_AS(bad_noise.validate(), DomainError);

    ScenarioConfig bad_angle = c;
    bad_angle.thetas[0] = 4.0;
    CHECK_THROWS_AS(bad_angle.validate(), DomainError);

    ScenarioConfig indefinite = c;
    indefinite.source_cov(0, 0) = -1.0;
    CHECK_THROWS_AS(indefinite.validate(), InvalidInputError);
}

TEST_CASE("sample_covariance examples") {
    ComplexMatrix y(2, 1);
    y << Complex(1, 0), Complex(0, 1);
    const SampleCovariance r = sample_covariance(y);
    CHECK(r.matrix(0, 0) == Complex(1, 0));
    CHECK(r.matrix(0, 1) == Complex(0, -1));
    CHECK(r.matrix(1, 0) == Complex(0, 1));
    CHECK(r.matrix(1, 1) == Complex(1, 0));
    CHECK_FALSE(r.positive_definite());
    CHECK_THROWS_AS(r.require_positive_definite(), SingularityError);

    const SampleCovariance half = sample_covariance(ComplexMatrix::Identity(2, 2));
    CHECK(max_abs(half.matrix.matrix() - 0.5 * ComplexMatrix::Identity(2, 2)) < 1e-16);
    CHECK(half.positive_definite());
    CHECK_FALSE(half.fewer_snapshots_than_sensors);

    CHECK(sample_covariance(ComplexMatrix::Ones(3, 2)).fewer_snapshots_than_sensors);
    CHECK_THROWS_AS(sample_covariance(ComplexMatrix(3, 0)), InvalidInputError);
}

TEST_CASE("sample_covariance trace identity and permutation invariance") {
    std::mt19937_64 rng(17);
    const ComplexMatrix y = random_complex(rng, 6, 200);
    const SampleCovariance r = sample_covariance(y);
    CHECK(r.positive_definite());
    CHECK(r.matrix.trace() == doctest::Approx(y.squaredNorm() / 200.0).epsilon(1e-12));

    std::vector<int> perm(200);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    ComplexMatrix shuffled(6, 200);
    for (int t = 0; t < 200; ++t) shuffled.col(t) = y.col(perm[static_cast<std::size_t>(t)]);
    CHECK(max_abs(sample_covariance(shuffled).matrix.matrix() - r.matrix.matrix()) < 1e-13);
}

TEST_CASE("generate_snapshots: white noise only") {
    ScenarioConfig c = reference_scenario(10000, 42);
    c.source_cov.setZero();
    c.noise_vars.setOnes();
    const SampleCovariance r = sample_covariance(generate_snapshots(c));
    CHECK(max_abs(r.matrix.matrix() - ComplexMatrix::Identity(6, 6)) < 0.15);
}

TEST_CASE("generate_snapshots: published scenario approaches the model covariance") {
    const ScenarioConfig c = reference_scenario(100000, 7);
    const SampleCovariance r = sample_covariance(generate_snapshots(c));
    const ComplexMatrix truth = true_covariance(c).matrix();
    CHECK((r.matrix.matrix() - truth).norm() / truth.norm() < 0.1);
}

TEST_CASE("generate_snapshots is deterministic for a seed") {
    const ScenarioConfig c = reference_scenario(100, 1234);
    const SnapshotMatrix a = generate_snapshots(c);
    const SnapshotMatrix b = generate_snapshots(c);
    REQUIRE(a.size() == b.size());
    CHECK(std::memcmp(a.data(), b.data(), sizeof(Complex) * static_cast<std::size_t>(a.size())) == 0);

    ScenarioConfig other = c;
    other.rng_seed = derive_seed(c.rng_seed, 0);
    CHECK(max_abs(generate_snapshots(other) - a) > 0.0);
    CHECK(derive_seed(5, 0) != derive_seed(5, 1));
    CHECK(derive_seed(5, 3) == derive_seed(5, 3));
}

TEST_CASE("whitened true covariance has M eigenvalues above one") {
    const ScenarioConfig c = reference_scenario();
    const ComplexMatrix truth = true_covariance(c).matrix();
    const RealVector inv_sd = c.noise_vars.cwiseSqrt().cwiseInverse();
    const ComplexMatrix w = inv_sd.cast<Complex>().asDiagonal() * truth * inv_sd.cast<Complex>().asDiagonal();
    const EigenPairs e = hermitian_eig(HermitianMatrix::from_upper(w));
    CHECK(e.values(0) > 1.0 + 1e-6);
    CHECK(e.values(1) > 1.0 + 1e-6);
    for (Eigen::Index k = 2; k < 6; ++k) CHECK(std::abs(e.values(k) - 1.0) < 1e-9);
}
