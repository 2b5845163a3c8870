#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "sgmcmc/rng.hpp"
#include "sgmcmc/targets.hpp"

namespace sgmcmc::cltlab {

/// Exact finite-support law of the conditional stochastic-gradient noise
/// N = (1/B) sum_j (grad f_{I_j}(x) - grad F(x)) at a frozen state.
struct NoiseLawExact {
  std::vector<Eigen::VectorXd> atoms;
  std::vector<double> weights;

  int dim() const { return atoms.empty() ? 0 : static_cast<int>(atoms[0].size()); }
  /// Scalar atoms; valid in one dimension only.
  std::vector<double> scalar_atoms() const;
  double variance_1d() const;
};

/// Exact noise law by n^B enumeration, or by B-fold convolution of the
/// n-atom component law in one dimension when n^B > 1e6.
NoiseLawExact enumerate_noise_law(const targets::StochasticOracle& oracle,
                                  const Eigen::VectorXd& x, int batch);

/// KL( mixture_m w_m N(sqrt(eta/2) atom_m, s^2) || N(0,1) ) by Simpson
/// quadrature, where s = 1 uncorrected and s = 1 - eta sigma_hat / 4
/// corrected. One-dimensional laws only.
double per_step_noise_kl(const NoiseLawExact& law, double eta, bool corrected,
                         double sigma_hat);

/// Least-squares slope of log KL against log B. Requires at least four
/// geometrically spaced batch sizes and positive KL values.
double fit_batch_scaling(const std::vector<std::pair<double, double>>& kl_by_batch);

enum class SummandFamily { kRademacherScaled, kFiniteSumNoise };

struct CltExperimentConfig {
  double beta = 0.0;       // almost-sure norm bound of the summands
  int batch = 1;           // B
  int dim = 1;             // exact transport requires d = 1
  SummandFamily family = SummandFamily::kRademacherScaled;
  long quantile_points = 100000;
  std::uint64_t seed = 0;
  // kFiniteSumNoise: zero-mean 1-D atoms/weights, rescaled so |atom| <= beta.
  std::vector<double> atoms;
  std::vector<double> atom_weights;
};

struct CltResult {
  double measured_w2sq = 0.0;
  double bound = 0.0;
};

/// Compares sqrt(1 - Sigma_Y) X + Y against N(0,1) by exact quantile
/// coupling; bound 25 beta^6 d (1 + log B)^2 / B. Enforces the lemma
/// hypotheses beta^2 <= 1/5 and ||Sigma_Y|| <= 1/(5d).
CltResult wass_clt_experiment(const CltExperimentConfig& config);

/// Compares Y = B^{-1/2} sum Y_i against N(0, Sigma_Y); bound
/// 25 beta^2 d (1 + log B)^2 / B.
CltResult zhai_clt_experiment(const CltExperimentConfig& config);

struct EnergyResult {
  double measured = 0.0;  // E || E[N | x, x_t] ||^2 by exact Bayes + quadrature
  double bound = 0.0;     // 576 h (M||x|| + G)^4 / B^2
};

/// Conditional noise energy after lookahead h along the interpolating
/// process, for an enumerable 1-D finite-sum oracle.
EnergyResult conditional_noise_energy(const targets::StochasticOracle& oracle,
                                      const Eigen::VectorXd& x, int batch,
                                      double lookahead, int grid_points = 20001);

struct CovCheckReport {
  double frobenius_error = 0.0;       // || mean Sigma_hat - Sigma ||_F
  double frobenius_tolerance = 0.0;   // 3 Monte-Carlo standard errors
  double second_moment_excess = 0.0;  // E[Tr(Sigma_hat^2)] - Tr(Sigma^2)
  double second_moment_bound = 0.0;   // 4 M^4 / (B^2 B')
  double second_moment_tolerance = 0.0;
  bool unbiased_ok = false;
  bool second_moment_ok = false;
  bool trace_bounds_ok = false;  // Tr(Sigma_hat^k) <= (2 M^2/B)^k, k = 1,2,3

  bool all_ok() const { return unbiased_ok && second_moment_ok && trace_bounds_ok; }
};

/// Monte-Carlo check of the covariance estimator guarantees against the
/// exact covariance obtained by component enumeration.
CovCheckReport cov_estimator_check(const targets::StochasticOracle& oracle,
                                   const Eigen::VectorXd& x, int batch,
                                   int estimator_batch, long draws,
                                   rng::SplitMix64& eng);

}  // namespace sgmcmc::cltlab
