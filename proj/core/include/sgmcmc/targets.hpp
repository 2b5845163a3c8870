#pragma once

#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "sgmcmc/rng.hpp"

namespace sgmcmc::targets {

/// Sampling target with density proportional to exp(-potential). Exact
/// first-order oracle plus optional isoperimetry/moment metadata used by the
/// bound evaluators. Immutable after construction, safe to share.
struct TargetSpec {
  int dim = 0;
  std::function<double(const Eigen::VectorXd&)> potential;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;
  std::optional<double> m1;            // first absolute moment of the target
  std::optional<double> m2;            // second moment, length units
  std::optional<double> lsi_constant;  // log-Sobolev constant
  std::optional<double> pi_constant;   // Poincare constant
  std::optional<double> lo_order;      // Latala-Oleszkiewicz order in [1,2]
};

/// Stochastic first-order oracle. `draw` returns B single-sample gradient
/// estimates; the caller owns the rng state. Every single-sample estimate g
/// satisfies ||g - grad F(x)|| <= growth_m * ||x|| + growth_g.
struct StochasticOracle {
  std::optional<long> component_count;  // nullopt marks an unbounded family
  std::function<std::vector<Eigen::VectorXd>(const Eigen::VectorXd&, int,
                                             rng::SplitMix64&)>
      draw;
  /// Gradient of component i (finite-sum oracles only).
  std::function<Eigen::VectorXd(long, const Eigen::VectorXd&)> component;
  /// Exact mean of the oracle, i.e. grad F.
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> mean_gradient;
  double growth_m = 0.0;
  double growth_g = 0.0;
  double smoothness_l = 0.0;
  double holder_s = 1.0;  // in (0, 1]
};

/// Nondecreasing moment-growth constants C_q for q in [0, p]:
/// E||x_k||^q <= C_q d^{q/2}.
struct MomentProfile {
  explicit MomentProfile(std::vector<double> constants);

  int order() const { return static_cast<int>(constants_.size()) - 1; }
  double at(int q) const;

 private:
  std::vector<double> constants_;
};

struct MixtureMode {
  double weight;
  Eigen::VectorXd mean;
  double variance;
};

/// Isotropic Gaussian N(0, v I); gradient(x) = x / v.
TargetSpec make_gaussian_target(int d, double variance);

/// F(x) = (1/n) sum_i A ||x - a_i||^2 / 2 with component oracle
/// grad f_i(x) = A (x - a_i). Noise is independent of x, so the oracle
/// reports M = 0 and G = A max_i ||a_i - abar||.
std::pair<TargetSpec, StochasticOracle> make_finite_sum_quadratic(
    const std::vector<Eigen::VectorXd>& centers, double curvature);

/// Gaussian mixture potential -log(sum_i w_i N(x; mu_i, v_i I)). Served with
/// exact gradients only; no stochastic oracle and no isoperimetry constants.
TargetSpec make_mixture_target(const std::vector<MixtureMode>& modes);

/// True iff every drawn single-sample estimate at every point satisfies the
/// linear growth bound with slack factor 1 + 1e-12.
bool check_growth(const StochasticOracle& oracle,
                  const std::vector<Eigen::VectorXd>& points, long draws,
                  rng::SplitMix64& eng);

}  // namespace sgmcmc::targets
