#include <benchmark/benchmark.h>

#include "sgmcmc/cltlab.hpp"
#include "sgmcmc/cov_estimate.hpp"
#include "sgmcmc/metrics.hpp"
#include "sgmcmc/rng.hpp"
#include "sgmcmc/targets.hpp"

using namespace sgmcmc;

namespace {

void BM_CovMatvecFactored(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const int rank = static_cast<int>(state.range(1));
  auto eng = rng::SplitMix64(1);
  std::vector<Eigen::VectorXd> factors;
  for (int j = 0; j < rank; ++j) factors.push_back(rng::standard_normal(d, eng));
  CovEstimate est(0.25, factors);
  Eigen::VectorXd x = rng::standard_normal(d, eng);
  for (auto _ : state) benchmark::DoNotOptimize(est.apply(x));
}

void BM_CovMatvecDense(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const int rank = static_cast<int>(state.range(1));
  auto eng = rng::SplitMix64(1);
  std::vector<Eigen::VectorXd> factors;
  for (int j = 0; j < rank; ++j) factors.push_back(rng::standard_normal(d, eng));
  Eigen::MatrixXd dense = CovEstimate(0.25, factors).dense(d);
  Eigen::VectorXd x = rng::standard_normal(d, eng);
  for (auto _ : state) benchmark::DoNotOptimize((dense * x).eval());
}

void BM_PerStepNoiseKl(benchmark::State& state) {
  Eigen::VectorXd a(1), b(1);
  a[0] = -1.0;
  b[0] = 1.0;
  auto [t, o] = targets::make_finite_sum_quadratic({a, b}, 1.0);
  auto law = cltlab::enumerate_noise_law(o, Eigen::VectorXd::Zero(1),
                                         static_cast<int>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(cltlab::per_step_noise_kl(law, 0.05, false, 0.0));
}

void BM_Gaussian_W2(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  auto eng = rng::SplitMix64(2);
  Eigen::MatrixXd m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = rng::uniform_real(-1.0, 1.0, eng);
  metrics::GaussianLaw p(Eigen::VectorXd::Zero(d), m * m.transpose());
  metrics::GaussianLaw q(Eigen::VectorXd::Ones(d),
                         Eigen::MatrixXd::Identity(d, d));
  for (auto _ : state) benchmark::DoNotOptimize(metrics::gaussian_w2(p, q));
}

}  // namespace

BENCHMARK(BM_CovMatvecFactored)->Args({256, 8})->Args({4096, 8});
BENCHMARK(BM_CovMatvecDense)->Args({256, 8})->Args({4096, 8});
BENCHMARK(BM_PerStepNoiseKl)->Arg(1)->Arg(16);
BENCHMARK(BM_Gaussian_W2)->Arg(8)->Arg(64);

BENCHMARK_MAIN();
