#include "mlfa/doa.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <utility>

namespace mlfa {

NoiseProjector noise_projector(const ComplexMatrix& loadings) {
    const Eigen::Index n = loadings.rows();
    const Eigen::Index m = loadings.cols();
    if (m < 1 || m >= n) throw InvalidInputError("noise projector needs 1 <= M < N");
    if (!loadings.allFinite()) throw InvalidInputError("loadings contain non-finite values");

    const EigenPairs eig = hermitian_eig(HermitianMatrix::from_upper(loadings * loadings.adjoint()));
    const ComplexMatrix minor = eig.vectors.rightCols(n - m);

    NoiseProjector out;
    out.matrix = HermitianMatrix::from_upper(minor * minor.adjoint());
    out.rank = n - m;
    const double largest = eig.values(0);
    out.rank_deficient = !(largest > 0.0) || eig.values(m - 1) <= 1e-12 * largest;
    return out;
}

std::vector<Complex> root_music_polynomial(const HermitianMatrix& projector) {
    const Eigen::Index n = projector.order();
    std::vector<Complex> coeffs(static_cast<std::size_t>(2 * n - 1), Complex{0.0, 0.0});
    for (Eigen::Index p = 0; p < n; ++p) {
        for (Eigen::Index q = 0; q < n; ++q) coeffs[static_cast<std::size_t>(q - p + n - 1)] += projector(p, q);
    }
    return coeffs;
}

namespace {

double angle_from_root(Complex z) {
    const double u = std::clamp(-std::arg(z) / std::numbers::pi, -1.0, 1.0);
    return std::acos(u);
}

// Representative per conjugate-reciprocal root pair (z, 1/conj(z)). Pairs are
// formed greedily by smallest mismatch; the representative is the midpoint
// of the inner root and the reflection of the outer one, which also merges
// unit-circle double roots that round-off split apart.
std::vector<Complex> reciprocal_representatives(const std::vector<Complex>& roots) {
    const std::size_t count = roots.size();
    struct Candidate {
        double mismatch;
        std::size_t a;
        std::size_t b;
    };
    auto reflect = [](Complex z) { return 1.0 / std::conj(z); };

    std::vector<Candidate> candidates;
    for (std::size_t a = 0; a < count; ++a) {
        for (std::size_t b = a + 1; b < count; ++b) {
            const double mismatch = std::abs(roots[a] - reflect(roots[b]));
            candidates.push_back({mismatch, a, b});
        }
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Candidate& x, const Candidate& y) { return x.mismatch < y.mismatch; });

    std::vector<bool> used(count, false);
    std::vector<Complex> reps;
    for (const Candidate& c : candidates) {
        if (used[c.a] || used[c.b]) continue;
        used[c.a] = used[c.b] = true;
        Complex inner = roots[c.a];
        Complex outer = roots[c.b];
        if (std::abs(inner) > std::abs(outer)) std::swap(inner, outer);
        reps.push_back(0.5 * (inner + reflect(outer)));
    }
    // An odd leftover (only when roots are not reciprocal-symmetric) is kept as is.
    for (std::size_t a = 0; a < count; ++a) {
        if (!used[a]) reps.push_back(roots[a]);
    }
    return reps;
}

}  // namespace

std::vector<double> root_music(const NoiseProjector& projector, Eigen::Index source_count) {
    const Eigen::Index n = projector.matrix.order();
    if (source_count < 1 || source_count >= n) throw InvalidInputError("Root-MUSIC needs 1 <= M < N");

    std::vector<Complex> coeffs = root_music_polynomial(projector.matrix);
    // Vanishing extreme coefficients only add roots at 0 and infinity.
    double scale = 0.0;
    for (const Complex& c : coeffs) scale = std::max(scale, std::abs(c));
    std::size_t trim = 0;
    while (coeffs.size() - 2 * trim > 2 && std::abs(coeffs[coeffs.size() - 1 - trim]) <= 1e-14 * scale &&
           std::abs(coeffs[trim]) <= 1e-14 * scale) {
        ++trim;
    }
    coeffs = std::vector<Complex>(coeffs.begin() + static_cast<std::ptrdiff_t>(trim),
                                  coeffs.end() - static_cast<std::ptrdiff_t>(trim));

    const std::vector<Complex> roots = polynomial_roots(coeffs);
    std::vector<Complex> inside;
    for (const Complex& z : reciprocal_representatives(roots)) {
        if (std::abs(z) <= 1.0 + 1e-9) inside.push_back(z);
    }
    std::stable_sort(inside.begin(), inside.end(),
                     [](Complex a, Complex b) { return std::abs(a) > std::abs(b); });

    std::vector<double> estimates;
    for (std::size_t k = 0; k < inside.size() && static_cast<Eigen::Index>(k) < source_count; ++k)
        estimates.push_back(angle_from_root(inside[k]));
    std::sort(estimates.begin(), estimates.end());

    if (static_cast<Eigen::Index>(estimates.size()) < source_count) {
        std::ostringstream os;
        os << "Root-MUSIC found " << estimates.size() << " roots inside the unit circle, needed " << source_count;
        throw EstimationFailure(os.str(), estimates);
    }
    return estimates;
}

std::vector<double> match_angles(std::span<const double> estimates, std::span<const double> truth) {
    if (estimates.size() != truth.size()) throw InvalidInputError("estimate and truth counts differ");
    struct Pair {
        double distance;
        std::size_t est;
        std::size_t tru;
    };
    std::vector<Pair> pairs;
    for (std::size_t e = 0; e < estimates.size(); ++e) {
        for (std::size_t t = 0; t < truth.size(); ++t) pairs.push_back({std::abs(estimates[e] - truth[t]), e, t});
    }
    std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) { return a.distance < b.distance; });

    std::vector<double> errors(truth.size(), 0.0);
    std::vector<bool> est_used(estimates.size(), false);
    std::vector<bool> truth_used(truth.size(), false);
    for (const Pair& p : pairs) {
        if (est_used[p.est] || truth_used[p.tru]) continue;
        est_used[p.est] = truth_used[p.tru] = true;
        errors[p.tru] = estimates[p.est] - truth[p.tru];
    }
    return errors;
}

std::vector<double> rmse(const std::vector<std::vector<double>>& errors) {
    if (errors.empty()) throw InvalidInputError("RMSE needs at least one realization");
    const std::size_t m = errors.front().size();
    std::vector<double> out(m, 0.0);
    for (const auto& row : errors) {
        if (row.size() != m) throw InvalidInputError("ragged error rows");
        for (std::size_t k = 0; k < m; ++k) out[k] += row[k] * row[k];
    }
    for (double& v : out) v = std::sqrt(v / static_cast<double>(errors.size()));
    return out;
}

CovarianceModel::CovarianceModel(const ScenarioConfig& config, OffDiagonalChart chart)
    : sensors_(config.sensor_count), sources_(config.source_count), chart_(chart) {
    config.validate();
    const Eigen::Index m = sources_;
    parameters_.resize(m + m * m + sensors_);
    Eigen::Index k = 0;
    for (double t : config.thetas) parameters_(k++) = t;
    for (Eigen::Index i = 0; i < m; ++i) parameters_(k++) = config.source_cov(i, i).real();
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = i + 1; j < m; ++j) {
            const Complex p = config.source_cov(i, j);
            if (chart_ == OffDiagonalChart::RealImaginary) {
                parameters_(k++) = p.real();
                parameters_(k++) = p.imag();
            } else {
                parameters_(k++) = std::abs(p);
                parameters_(k++) = std::arg(p);
            }
        }
    }
    for (Eigen::Index n = 0; n < sensors_; ++n) parameters_(k++) = config.noise_vars(n);
}

ComplexMatrix CovarianceModel::source_cov(const RealVector& phi) const {
    const Eigen::Index m = sources_;
    ComplexMatrix p = ComplexMatrix::Zero(m, m);
    Eigen::Index k = m;
    for (Eigen::Index i = 0; i < m; ++i) p(i, i) = phi(k++);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = i + 1; j < m; ++j) {
            const double x = phi(k++);
            const double y = phi(k++);
            p(i, j) = chart_ == OffDiagonalChart::RealImaginary ? Complex(x, y) : std::polar(x, y);
            p(j, i) = std::conj(p(i, j));
        }
    }
    return p;
}

ComplexMatrix CovarianceModel::covariance(const RealVector& phi) const {
    const std::vector<double> thetas(phi.data(), phi.data() + sources_);
    const ComplexMatrix a = manifold(thetas, sensors_);
    ComplexMatrix c = a * source_cov(phi) * a.adjoint();
    c.diagonal() += phi.tail(sensors_).cast<Complex>();
    return c;
}

std::vector<ComplexMatrix> CovarianceModel::derivatives(const RealVector& phi) const {
    const Eigen::Index n = sensors_;
    const Eigen::Index m = sources_;
    const std::vector<double> thetas(phi.data(), phi.data() + m);
    const ComplexMatrix a = manifold(thetas, n);
    const ComplexMatrix p = source_cov(phi);
    std::vector<ComplexMatrix> out;
    out.reserve(static_cast<std::size_t>(parameter_count()));

    for (Eigen::Index i = 0; i < m; ++i) {
        // d/dtheta exp(-j n pi cos theta) = j n pi sin theta * exp(...)
        ComplexMatrix a_dot = ComplexMatrix::Zero(n, m);
        const Complex gain(0.0, std::numbers::pi * std::sin(thetas[static_cast<std::size_t>(i)]));
        for (Eigen::Index row = 0; row < n; ++row) a_dot(row, i) = gain * static_cast<double>(row) * a(row, i);
        const ComplexMatrix half = a_dot * p * a.adjoint();
        out.push_back(half + half.adjoint());
    }

    auto through_manifold = [&](const ComplexMatrix& dp) { return ComplexMatrix(a * dp * a.adjoint()); };
    for (Eigen::Index i = 0; i < m; ++i) {
        ComplexMatrix dp = ComplexMatrix::Zero(m, m);
        dp(i, i) = 1.0;
        out.push_back(through_manifold(dp));
    }
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = i + 1; j < m; ++j) {
            ComplexMatrix first = ComplexMatrix::Zero(m, m);
            ComplexMatrix second = ComplexMatrix::Zero(m, m);
            if (chart_ == OffDiagonalChart::RealImaginary) {
                first(i, j) = 1.0;
                first(j, i) = 1.0;
                second(i, j) = Complex(0.0, 1.0);
                second(j, i) = Complex(0.0, -1.0);
            } else {
                const double rho = std::abs(p(i, j));
                const Complex e = rho > 0.0 ? p(i, j) / rho : Complex(1.0, 0.0);
                first(i, j) = e;
                first(j, i) = std::conj(e);
                second(i, j) = Complex(0.0, 1.0) * p(i, j);
                second(j, i) = std::conj(second(i, j));
            }
            out.push_back(through_manifold(first));
            out.push_back(through_manifold(second));
        }
    }
    for (Eigen::Index k = 0; k < n; ++k) {
        ComplexMatrix dq = ComplexMatrix::Zero(n, n);
        dq(k, k) = 1.0;
        out.push_back(dq);
    }
    return out;
}

RealMatrix fisher_information(const ScenarioConfig& config, OffDiagonalChart chart) {
    const CovarianceModel model(config, chart);
    const RealVector& phi = model.parameters();
    const HermitianMatrix c_inv = pd_inverse(HermitianMatrix::from_upper(model.covariance(phi)));
    const std::vector<ComplexMatrix> d = model.derivatives(phi);

    std::vector<ComplexMatrix> weighted;
    weighted.reserve(d.size());
    for (const ComplexMatrix& di : d) weighted.push_back(c_inv.matrix() * di);

    const auto k = static_cast<Eigen::Index>(d.size());
    RealMatrix fim(k, k);
    const double snapshots = static_cast<double>(config.snapshot_count);
    for (Eigen::Index i = 0; i < k; ++i) {
        for (Eigen::Index j = i; j < k; ++j) {
            // tr(X Y) = sum_{ab} X_ab Y_ba
            const Complex tr = (weighted[static_cast<std::size_t>(i)].array() *
                                weighted[static_cast<std::size_t>(j)].transpose().array())
                                   .sum();
            fim(i, j) = fim(j, i) = snapshots * tr.real();
        }
    }
    return fim;
}

CrlbResult crlb(const ScenarioConfig& config, OffDiagonalChart chart) {
    const RealMatrix fim = fisher_information(config, chart);
    Eigen::SelfAdjointEigenSolver<RealMatrix> eig(fim);
    const double largest = eig.eigenvalues().maxCoeff();
    const double smallest = eig.eigenvalues().minCoeff();
    if (!(largest > 0.0) || !(smallest > 1e-12 * largest)) {
        std::ostringstream os;
        os << "Fisher information is singular (smallest eigenvalue " << smallest << "); scenario is unidentifiable";
        throw SingularityError(os.str(), smallest);
    }
    const RealMatrix inverse =
        eig.eigenvectors() * eig.eigenvalues().cwiseInverse().asDiagonal() * eig.eigenvectors().transpose();
    CrlbResult out;
    for (Eigen::Index m = 0; m < config.source_count; ++m) out.per_angle_std.push_back(std::sqrt(inverse(m, m)));
    return out;
}

}  // namespace mlfa
