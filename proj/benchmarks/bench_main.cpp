#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "mlfa/doa.hpp"
#include "mlfa/ecme.hpp"
#include "mlfa/faan.hpp"
#include "mlfa/model.hpp"

namespace {

mlfa::HermitianMatrix reference_sample_cov(Eigen::Index snapshots = 100) {
    const mlfa::ScenarioConfig config = mlfa::reference_scenario(snapshots, 7);
    return mlfa::sample_covariance(mlfa::generate_snapshots(config)).matrix;
}

mlfa::SolverOptions untraced() {
    mlfa::SolverOptions options;
    options.record_objective = false;
    return options;
}

void BM_HermitianEig(benchmark::State& state) {
    const auto n = static_cast<Eigen::Index>(state.range(0));
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g;
    mlfa::ComplexMatrix a(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) a(i, j) = {g(rng), g(rng)};
    const auto h = mlfa::HermitianMatrix::from_upper(a * a.adjoint());
    for (auto _ : state) benchmark::DoNotOptimize(mlfa::hermitian_eig(h));
}
BENCHMARK(BM_HermitianEig)->Arg(6)->Arg(16)->Arg(64);

void BM_FaanIteration(benchmark::State& state) {
    const auto r = reference_sample_cov();
    const mlfa::RealVector q0 = mlfa::RealVector::Ones(6);
    const auto sweeps = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(mlfa::faan_solve(r, 2, q0, 1, sweeps, untraced()));
}
BENCHMARK(BM_FaanIteration)->Arg(1)->Arg(100);

void BM_EcmeIteration(benchmark::State& state) {
    const auto r = reference_sample_cov();
    const mlfa::RealVector q0 = mlfa::RealVector::Ones(6);
    for (auto _ : state) benchmark::DoNotOptimize(mlfa::ecme_solve(r, 2, q0, 1, untraced()));
}
BENCHMARK(BM_EcmeIteration);

void BM_RootMusic(benchmark::State& state) {
    const auto n = static_cast<Eigen::Index>(state.range(0));
    const std::vector<double> thetas{1.0, 2.0};
    const auto projector = mlfa::noise_projector(mlfa::manifold(thetas, n));
    for (auto _ : state) benchmark::DoNotOptimize(mlfa::root_music(projector, 2));
}
BENCHMARK(BM_RootMusic)->Arg(6)->Arg(16);

void BM_Crlb(benchmark::State& state) {
    const mlfa::ScenarioConfig config = mlfa::reference_scenario(100);
    for (auto _ : state) benchmark::DoNotOptimize(mlfa::crlb(config));
}
BENCHMARK(BM_Crlb);

}  // namespace

BENCHMARK_MAIN();
