#include "mlfa/model.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace mlfa {

namespace {

void check_angle(double theta) {
    if (!(theta > 0.0 && theta < std::numbers::pi)) {
        std::ostringstream os;
        os << "angle " << theta << " rad is outside (0, pi)";
        throw DomainError(os.str());
    }
}

}  // namespace

void ScenarioConfig::validate() const {
    if (sensor_count < 1) throw InvalidInputError("sensor_count must be positive");
    if (source_count < 1) throw InvalidInputError("source_count must be positive");
    if (source_count >= sensor_count) throw InvalidInputError("source_count must be less than sensor_count");
    if (static_cast<Eigen::Index>(thetas.size()) != source_count)
        throw InvalidInputError("thetas must have source_count entries");
    for (double t : thetas) check_angle(t);
    if (source_cov.rows() != source_count || source_cov.cols() != source_count)
        throw InvalidInputError("source_cov must be source_count x source_count");
    if (noise_vars.size() != sensor_count) throw InvalidInputError("noise_vars must have sensor_count entries");
    for (Eigen::Index n = 0; n < noise_vars.size(); ++n) {
        if (!(noise_vars(n) > 0.0) || !std::isfinite(noise_vars(n)))
            throw DomainError("noise variances must be positive and finite");
    }
    if (snapshot_count < sensor_count) throw InvalidInputError("snapshot_count must be at least sensor_count");
    const HermitianMatrix p = HermitianMatrix::checked(source_cov, 1e-12);
    const double floor = -1e-12 * std::max(1.0, p.matrix().cwiseAbs().maxCoeff());
    if (min_eigenvalue(p) < floor) throw InvalidInputError("source_cov must be positive semidefinite");
}

ScenarioConfig reference_scenario(Eigen::Index snapshot_count, std::uint64_t seed) {
    ScenarioConfig c;
    c.sensor_count = 6;
    c.source_count = 2;
    c.thetas = {degrees_to_radians(60.0), degrees_to_radians(120.0)};
    c.source_cov = 10.0 * ComplexMatrix::Identity(2, 2);
    c.noise_vars.resize(6);
    c.noise_vars << 10.0, 2.0, 3.0, 2.0, 1.0, 3.0;
    c.snapshot_count = snapshot_count;
    c.rng_seed = seed;
    return c;
}

const HermitianMatrix& SampleCovariance::require_positive_definite() const {
    if (!positive_definite()) {
        std::ostringstream os;
        os << "sample covariance is not positive definite (smallest eigenvalue " << smallest_eigenvalue << ")";
        if (fewer_snapshots_than_sensors) os << "; fewer snapshots than sensors";
        throw SingularityError(os.str(), smallest_eigenvalue);
    }
    return matrix;
}

ComplexVector steering_vector(double theta, Eigen::Index sensor_count) {
    check_angle(theta);
    if (sensor_count < 1) throw InvalidInputError("sensor_count must be positive");
    ComplexVector a(sensor_count);
    const double phase = std::numbers::pi * std::cos(theta);
    for (Eigen::Index n = 0; n < sensor_count; ++n) a(n) = std::polar(1.0, -static_cast<double>(n) * phase);
    return a;
}

ComplexMatrix manifold(std::span<const double> thetas, Eigen::Index sensor_count) {
    ComplexMatrix a(sensor_count, static_cast<Eigen::Index>(thetas.size()));
    for (std::size_t m = 0; m < thetas.size(); ++m)
        a.col(static_cast<Eigen::Index>(m)) = steering_vector(thetas[m], sensor_count);
    return a;
}

HermitianMatrix true_covariance(const ScenarioConfig& config) {
    const ComplexMatrix a = manifold(config.thetas, config.sensor_count);
    ComplexMatrix c = a * config.source_cov * a.adjoint();
    c.diagonal() += config.noise_vars.cast<Complex>();
    return HermitianMatrix::from_upper(c);
}

ComplexMatrix psd_sqrt(const HermitianMatrix& h) {
    const EigenPairs eig = hermitian_eig(h);
    const RealVector root = eig.values.cwiseMax(0.0).cwiseSqrt();
    return eig.vectors * root.asDiagonal() * eig.vectors.adjoint();
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
    std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

SnapshotMatrix generate_snapshots(const ScenarioConfig& config) {
    config.validate();
    const Eigen::Index n = config.sensor_count;
    const Eigen::Index m = config.source_count;
    const Eigen::Index l = config.snapshot_count;

    std::mt19937_64 rng(config.rng_seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double half = std::sqrt(0.5);
    auto circular = [&](Eigen::Index rows) {
        ComplexMatrix w(rows, l);
        for (Eigen::Index t = 0; t < l; ++t) {
            for (Eigen::Index i = 0; i < rows; ++i) {
                const double re = gauss(rng);
                const double im = gauss(rng);
                w(i, t) = Complex(re * half, im * half);
            }
        }
        return w;
    };

    const ComplexMatrix source_root = psd_sqrt(HermitianMatrix::from_upper(config.source_cov));
    const ComplexMatrix signals = source_root * circular(m);
    const ComplexMatrix noise = config.noise_vars.cwiseSqrt().cast<Complex>().asDiagonal() * circular(n);
    return manifold(config.thetas, n) * signals + noise;
}

SampleCovariance sample_covariance(const SnapshotMatrix& snapshots) {
    const Eigen::Index l = snapshots.cols();
    if (l < 1) throw InvalidInputError("at least one snapshot is required");
    if (!snapshots.allFinite()) throw InvalidInputError("snapshots contain non-finite values");
    SampleCovariance out;
    const ComplexMatrix r = (snapshots * snapshots.adjoint()) / static_cast<double>(l);
    out.matrix = HermitianMatrix::from_upper(r);
    out.smallest_eigenvalue = min_eigenvalue(out.matrix);
    out.fewer_snapshots_than_sensors = l < snapshots.rows();
    return out;
}

double degrees_to_radians(double degrees) noexcept { return degrees * std::numbers::pi / 180.0; }
double radians_to_degrees(double radians) noexcept { return radians * 180.0 / std::numbers::pi; }

}  // namespace mlfa
