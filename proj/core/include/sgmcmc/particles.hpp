#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "sgmcmc/cov_estimate.hpp"
#include "sgmcmc/rng.hpp"

namespace sgmcmc::particles {

using ConfineFn =
    std::function<Eigen::VectorXd(long step, int particle, const Eigen::VectorXd&)>;
using KernelFn = std::function<Eigen::VectorXd(
    long step, int i, int j, const Eigen::VectorXd&, const Eigen::VectorXd&)>;

enum class Variant { kIPD, kRBM, kCCRBM };

std::string variant_name(Variant v);
Variant variant_from_name(const std::string& name);

/// n-particle aggregation-diffusion system. Interaction kernels must satisfy
/// ||K|| <= kernel_bound; every evaluation is checked.
struct ParticleSystem {
  int n = 0;
  int d = 0;
  std::vector<Eigen::VectorXd> states;
  ConfineFn confine;          // external force g^i_k, may be empty (zero)
  KernelFn interact;          // pairwise kernel K^ij_k, may be empty (zero)
  double kernel_bound = 0.0;  // M
  double diffusion = 1.0;     // sigma > 0
  double step = 0.0;          // eta > 0
  int batch = 1;              // B
  int estimator_batch = 1;    // B'
};

struct RunCounters {
  std::uint64_t kernel_evals = 0;
  std::uint64_t correction_ops = 0;
};

/// Synchronous exact update: every interaction is evaluated against the
/// pre-step snapshot. Theta(n^2) kernel evaluations.
std::vector<Eigen::VectorXd> ipd_step(const ParticleSystem& system, long step_index,
                                      const std::vector<Eigen::VectorXd>& noises,
                                      RunCounters* counters = nullptr);

/// Random-batch update: particle i interacts with the B sampled partners
/// indices[i][0..B). Theta(nB) kernel evaluations. When `diagnostics` is
/// given, also fills the per-particle noise N^i = Khat^i - full mean
/// (Theta(n^2) extra kernel evaluations).
std::vector<Eigen::VectorXd> rbm_step(
    const ParticleSystem& system, long step_index,
    const std::vector<std::vector<long>>& indices,
    const std::vector<Eigen::VectorXd>& noises, RunCounters* counters = nullptr,
    std::vector<Eigen::VectorXd>* diagnostics = nullptr);

/// Low-rank interaction covariance estimate for particle i from the
/// independently drawn index pairs (J_l, Jbar_l); coefficient 1/(2 B B').
CovEstimate ccrbm_covariance_estimate(const ParticleSystem& system,
                                      long step_index, int i,
                                      const std::vector<long>& j_indices,
                                      const std::vector<long>& jbar_indices,
                                      RunCounters* counters = nullptr);

/// RBM drift plus covariance-corrected diffusion
/// sigma sqrt(eta) (I - eta/(2 sigma^2) Sigma_hat^i) eps^i, the correction
/// applied through the factored O(d B') matvec.
std::vector<Eigen::VectorXd> ccrbm_step(
    const ParticleSystem& system, long step_index,
    const std::vector<std::vector<long>>& indices,
    const std::vector<std::vector<long>>& est_j,
    const std::vector<std::vector<long>>& est_jbar,
    const std::vector<Eigen::VectorXd>& noises, RunCounters* counters = nullptr);

struct ParticleRunResult {
  std::vector<std::vector<Eigen::VectorXd>> snapshots;  // horizon + 1 entries
  RunCounters counters;
  std::vector<std::string> warnings;
};

/// Deterministic seeded evolution; per-step index/noise/estimator substreams
/// mirror the single-chain layout so variant reductions are bit-exact.
ParticleRunResult run_particles(const ParticleSystem& system, Variant variant,
                                long horizon, std::uint64_t seed);

/// Componentwise bounded kernel M sin(y - x).
KernelFn make_sine_kernel(double bound);

/// Radial force -psi'(||x - y||) (x - y)/||x - y|| with norm clipped at
/// `bound`; the singular self term is mapped to zero.
KernelFn make_clipped_gradient_kernel(std::function<double(double)> psi_prime,
                                      double bound);

/// Linear confining force -rate * x.
ConfineFn make_linear_confine(double rate);

}  // namespace sgmcmc::particles
