#include "mlfa/objective.hpp"

#include <algorithm>
#include <cmath>

namespace mlfa {

void FactorEstimate::validate() const {
    if (loadings.rows() != noise_vars.size())
        throw InvalidInputError("loadings row count must match the number of noise variances");
    if (!loadings.allFinite()) throw InvalidInputError("loadings contain non-finite values");
    for (Eigen::Index n = 0; n < noise_vars.size(); ++n) {
        if (!(noise_vars(n) > 0.0) || !std::isfinite(noise_vars(n)))
            throw DomainError("noise variances must be positive and finite");
    }
}

HermitianMatrix assemble_covariance(const FactorEstimate& est) {
    est.validate();
    ComplexMatrix c = est.loadings * est.loadings.adjoint();
    c.diagonal() += est.noise_vars.cast<Complex>();
    return HermitianMatrix::from_upper(c);
}

double negative_llf(const FactorEstimate& est, const HermitianMatrix& sample_cov) {
    est.validate();
    if (sample_cov.order() != est.sensor_count())
        throw InvalidInputError("sample covariance order does not match the estimate");

    const RealVector inv_sd = est.noise_vars.cwiseSqrt().cwiseInverse();
    const ComplexMatrix ws = inv_sd.cast<Complex>().asDiagonal() * est.loadings;
    ComplexMatrix core = ws * ws.adjoint();
    core.diagonal().array() += 1.0;
    const EigenPairs eig = hermitian_eig(HermitianMatrix::from_upper(core));

    const ComplexMatrix whitened =
        inv_sd.cast<Complex>().asDiagonal() * sample_cov.matrix() * inv_sd.cast<Complex>().asDiagonal();

    double log_det = est.noise_vars.array().log().sum();
    double fit = 0.0;
    for (Eigen::Index k = 0; k < eig.values.size(); ++k) {
        log_det += std::log(eig.values(k));
        const ComplexVector v = eig.vectors.col(k);
        fit += (v.adjoint() * whitened * v)(0, 0).real() / eig.values(k);
    }
    return log_det + fit;
}

double stationarity_residual(const FactorEstimate& est, const HermitianMatrix& sample_cov) {
    est.validate();
    const Eigen::Index n = est.sensor_count();
    const Eigen::Index m = est.factor_count();
    double worst = 0.0;

    // Probing mutates a private copy, so the caller's estimate stays untouched.
    FactorEstimate work = est;
    auto probe = [&](auto&& get, auto&& set, bool positive) {
        const double p = get();
        double h = 1e-5 * (1.0 + std::abs(p));
        if (positive) h = std::min(h, 0.5 * p);
        set(p + h);
        const double up = negative_llf(work, sample_cov);
        set(p - h);
        const double down = negative_llf(work, sample_cov);
        set(p);
        worst = std::max(worst, std::abs(up - down) / (2.0 * h));
    };

    for (Eigen::Index j = 0; j < m; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
            Complex& s = work.loadings(i, j);
            probe([&] { return s.real(); }, [&](double v) { s.real(v); }, false);
            probe([&] { return s.imag(); }, [&](double v) { s.imag(v); }, false);
        }
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        double& q = work.noise_vars(i);
        probe([&] { return q; }, [&](double v) { q = v; }, true);
    }
    return worst;
}

}  // namespace mlfa
