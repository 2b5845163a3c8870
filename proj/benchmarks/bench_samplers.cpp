#include <benchmark/benchmark.h>

#include "sgmcmc/samplers.hpp"
#include "sgmcmc/targets.hpp"

using namespace sgmcmc;

namespace {

std::pair<targets::TargetSpec, targets::StochasticOracle> oracle_d(int d, int n) {
  std::vector<Eigen::VectorXd> centers;
  for (int i = 0; i < n; ++i)
    centers.push_back(Eigen::VectorXd::Constant(d, 0.1 * i - 0.5));
  return targets::make_finite_sum_quadratic(centers, 1.0);
}

void BM_RunChain(benchmark::State& state, samplers::Variant variant) {
  const int d = static_cast<int>(state.range(0));
  auto [target, oracle] = oracle_d(d, 32);
  samplers::ChainConfig cfg;
  cfg.step = 0.01;
  cfg.batch = 8;
  cfg.horizon = 256;
  cfg.seed = 1;
  cfg.variant = variant;
  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(d);
  for (auto _ : state) {
    auto traj = samplers::run_chain(target, &oracle, cfg, x0);
    benchmark::DoNotOptimize(traj.iterates.back());
  }
  state.SetItemsProcessed(state.iterations() * cfg.horizon);
}

}  // namespace

BENCHMARK_CAPTURE(BM_RunChain, lmc, samplers::Variant::kLMC)->Arg(4)->Arg(64);
BENCHMARK_CAPTURE(BM_RunChain, sgld, samplers::Variant::kSGLD)->Arg(4)->Arg(64);
BENCHMARK_CAPTURE(BM_RunChain, ccsgld, samplers::Variant::kCCSGLD)->Arg(4)->Arg(64);
