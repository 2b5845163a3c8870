#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "sgmcmc/cov_estimate.hpp"
#include "sgmcmc/rng.hpp"
#include "sgmcmc/targets.hpp"

namespace sgmcmc::samplers {

enum class Variant { kLMC, kSGLD, kABSGLD, kCCSGLD };

std::string variant_name(Variant v);
Variant variant_from_name(const std::string& name);

struct ChainConfig {
  double step = 0.0;           // eta > 0
  int batch = 1;               // B
  long horizon = 0;            // K
  std::uint64_t seed = 0;
  Variant variant = Variant::kLMC;
  int estimator_batch = 0;     // CC-SGLD fresh batch size; 0 means batch
};

/// Everything consumed by one update, enough to replay it bit-exactly.
struct StepRecord {
  int batch_used = 0;
  Eigen::VectorXd grad_estimate;  // g_k actually applied
  Eigen::VectorXd gauss;          // injected epsilon_k
  Eigen::VectorXd noise;          // N_k = g_k - grad F(x_k)
  Eigen::VectorXd correction;     // covariance estimate applied to epsilon_k
  bool corrected = false;         // CC-SGLD step with a nonzero estimate
};

struct Trajectory {
  double eta = 0.0;
  Variant variant = Variant::kLMC;
  std::vector<Eigen::VectorXd> iterates;  // length horizon + 1
  std::vector<StepRecord> records;        // length horizon
  std::vector<std::string> warnings;
};

/// x - eta * grad + sqrt(2 eta) * eps.
Eigen::VectorXd lmc_step(const Eigen::VectorXd& x, const Eigen::VectorXd& grad,
                         double eta, const Eigen::VectorXd& eps);

/// x - (eta/B) sum(grads) + sqrt(2 eta) * eps.
Eigen::VectorXd sgld_step(const Eigen::VectorXd& x,
                          const std::vector<Eigen::VectorXd>& grads, double eta,
                          const Eigen::VectorXd& eps);

/// Adaptive batch size min{n, 1 + ceil(M ||x|| + G)}.
long absgld_batch_size(const Eigen::VectorXd& x, double growth_m,
                       double growth_g, long n);

/// Thresholded low-rank covariance estimate from a fresh batch of pairs.
/// Returns the zero estimate when (M||x|| + G)^2 > B / (5 eta d); otherwise
/// (1 / (2 B B_est)) sum_j d_j d_j^T with d_j the j-th pair difference.
CovEstimate ccsgld_covariance_estimate(
    const Eigen::VectorXd& x,
    const std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>>& fresh_pairs,
    double eta, int batch, double growth_m, double growth_g, int dim);

/// x - (eta/B) sum(grads) + sqrt(2 eta) (eps - (eta/4) estimate(eps)),
/// applying the estimate through its factored matvec.
Eigen::VectorXd ccsgld_step(const Eigen::VectorXd& x,
                            const std::vector<Eigen::VectorXd>& grads,
                            double eta, const Eigen::VectorXd& eps,
                            const CovEstimate& estimate);

/// Runs K steps with the deterministic seeded stream layout: at step k the
/// batch indices, the Gaussian, and the CC-SGLD estimator indices each come
/// from their own substream derived from (seed, purpose, k), so variants that
/// skip a purpose still share the remaining draws bit-exactly.
Trajectory run_chain(const targets::TargetSpec& target,
                     const targets::StochasticOracle* oracle,
                     const ChainConfig& config, const Eigen::VectorXd& x0);

/// Default chain start: N(0, I/L) when the oracle reports L > 0, else N(0, I).
Eigen::VectorXd default_init(const targets::TargetSpec& target,
                             const targets::StochasticOracle* oracle,
                             std::uint64_t seed);

/// Recomputes the iterates from x0 and the stored records; bit-exact.
std::vector<Eigen::VectorXd> replay_trajectory(const Eigen::VectorXd& x0,
                                               const Trajectory& trajectory);

/// One draw from the time-averaged law: runs floor(tbar/eta) full steps and
/// finishes with a partial update of length tbar - k eta.
Eigen::VectorXd sample_averaged_law_at(const targets::TargetSpec& target,
                                       const targets::StochasticOracle* oracle,
                                       const ChainConfig& config,
                                       const Eigen::VectorXd& x0, double tbar,
                                       rng::SplitMix64& eng);

/// Same with tbar drawn uniformly on [0, K eta] from `eng`.
Eigen::VectorXd sample_averaged_law(const targets::TargetSpec& target,
                                    const targets::StochasticOracle* oracle,
                                    const ChainConfig& config,
                                    const Eigen::VectorXd& x0,
                                    rng::SplitMix64& eng);

}  // namespace sgmcmc::samplers
