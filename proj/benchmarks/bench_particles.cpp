#include <benchmark/benchmark.h>

#include "sgmcmc/particles.hpp"

using namespace sgmcmc;

namespace {

particles::ParticleSystem system_of(int n, int batch) {
  particles::ParticleSystem s;
  s.n = n;
  s.d = 2;
  s.step = 0.001;
  s.diffusion = 1.0;
  s.batch = batch;
  s.estimator_batch = batch;
  s.kernel_bound = 1.0;
  s.interact = particles::make_sine_kernel(1.0);
  for (int i = 0; i < n; ++i)
    s.states.push_back(Eigen::VectorXd::Constant(2, 0.01 * i));
  return s;
}

void BM_ParticleStep(benchmark::State& state, particles::Variant variant) {
  const int n = static_cast<int>(state.range(0));
  const int batch = static_cast<int>(state.range(1));
  auto s = system_of(n, batch);
  for (auto _ : state) {
    auto res = particles::run_particles(s, variant, 1, 7);
    benchmark::DoNotOptimize(res.counters.kernel_evals);
  }
  state.SetItemsProcessed(state.iterations() * n);
}

}  // namespace

// the O(n^2) vs O(nB) per-step gap is the point of the random batch method
BENCHMARK_CAPTURE(BM_ParticleStep, ipd, particles::Variant::kIPD)
    ->Args({128, 8})
    ->Args({512, 8});
BENCHMARK_CAPTURE(BM_ParticleStep, rbm, particles::Variant::kRBM)
    ->Args({128, 8})
    ->Args({512, 8});
BENCHMARK_CAPTURE(BM_ParticleStep, ccrbm, particles::Variant::kCCRBM)
    ->Args({128, 8})
    ->Args({512, 8});
