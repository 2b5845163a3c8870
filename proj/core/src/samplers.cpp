#include "sgmcmc/samplers.hpp"

#include <cmath>
#include <stdexcept>

namespace sgmcmc::samplers {

std::string variant_name(Variant v) {
  switch (v) {
    case Variant::kLMC: return "LMC";
    case Variant::kSGLD: return "SGLD";
    case Variant::kABSGLD: return "ABSGLD";
    case Variant::kCCSGLD: return "CCSGLD";
  }
  return "?";
}

Variant variant_from_name(const std::string& name) {
  if (name == "LMC") return Variant::kLMC;
  if (name == "SGLD") return Variant::kSGLD;
  if (name == "ABSGLD") return Variant::kABSGLD;
  if (name == "CCSGLD") return Variant::kCCSGLD;
  throw std::invalid_argument("unknown chain variant: " + name);
}

namespace {

Eigen::VectorXd mean_of(const std::vector<Eigen::VectorXd>& grads) {
  if (grads.empty()) throw std::invalid_argument("empty gradient batch");
  Eigen::VectorXd m = grads[0];
  for (std::size_t i = 1; i < grads.size(); ++i) m += grads[i];
  return m / static_cast<double>(grads.size());
}

// Shared by every variant so the zero-noise reductions stay bit-exact.
Eigen::VectorXd update(const Eigen::VectorXd& x, const Eigen::VectorXd& grad,
                       double eta, const Eigen::VectorXd& eps_eff) {
  return x - eta * grad + std::sqrt(2.0 * eta) * eps_eff;
}

void check_eta(double eta) {
  if (!(eta > 0.0)) throw std::invalid_argument("step size eta must be > 0");
}

}  // namespace

Eigen::VectorXd lmc_step(const Eigen::VectorXd& x, const Eigen::VectorXd& grad,
                         double eta, const Eigen::VectorXd& eps) {
  check_eta(eta);
  return update(x, grad, eta, eps);
}

Eigen::VectorXd sgld_step(const Eigen::VectorXd& x,
                          const std::vector<Eigen::VectorXd>& grads, double eta,
                          const Eigen::VectorXd& eps) {
  check_eta(eta);
  return update(x, mean_of(grads), eta, eps);
}

long absgld_batch_size(const Eigen::VectorXd& x, double growth_m,
                       double growth_g, long n) {
  long adaptive = 1 + static_cast<long>(std::ceil(growth_m * x.norm() + growth_g));
  return std::min(n, adaptive);
}

CovEstimate ccsgld_covariance_estimate(
    const Eigen::VectorXd& x,
    const std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>>& fresh_pairs,
    double eta, int batch, double growth_m, double growth_g, int dim) {
  check_eta(eta);
  if (fresh_pairs.empty())
    throw std::invalid_argument("ccsgld_covariance_estimate: empty fresh batch");
  const double u = growth_m * x.norm() + growth_g;
  if (u * u > static_cast<double>(batch) / (5.0 * eta * dim)) {
    return CovEstimate::Zero();
  }
  std::vector<Eigen::VectorXd> diffs;
  diffs.reserve(fresh_pairs.size());
  for (const auto& [g1, g2] : fresh_pairs) diffs.emplace_back(g1 - g2);
  double coeff = 1.0 / (2.0 * batch * static_cast<double>(fresh_pairs.size()));
  return CovEstimate(coeff, std::move(diffs));
}

namespace {

Eigen::VectorXd ccsgld_step_applied(const Eigen::VectorXd& x,
                                    const Eigen::VectorXd& grad, double eta,
                                    const Eigen::VectorXd& eps,
                                    const Eigen::VectorXd& applied) {
  Eigen::VectorXd eps_eff = eps - (eta / 4.0) * applied;
  return update(x, grad, eta, eps_eff);
}

}  // namespace

Eigen::VectorXd ccsgld_step(const Eigen::VectorXd& x,
                            const std::vector<Eigen::VectorXd>& grads,
                            double eta, const Eigen::VectorXd& eps,
                            const CovEstimate& estimate) {
  check_eta(eta);
  return ccsgld_step_applied(x, mean_of(grads), eta, eps, estimate.apply(eps));
}

Eigen::VectorXd default_init(const targets::TargetSpec& target,
                             const targets::StochasticOracle* oracle,
                             std::uint64_t seed) {
  double l = (oracle != nullptr) ? oracle->smoothness_l : 0.0;
  double sd = (l > 0.0) ? 1.0 / std::sqrt(l) : 1.0;
  auto eng = rng::engine_for(seed, rng::Stream::kChainInit, 0);
  return sd * rng::standard_normal(target.dim, eng);
}

Trajectory run_chain(const targets::TargetSpec& target,
                     const targets::StochasticOracle* oracle,
                     const ChainConfig& config, const Eigen::VectorXd& x0) {
  check_eta(config.step);
  if (config.horizon < 0) throw std::invalid_argument("horizon must be >= 0");
  if (config.batch < 1) throw std::invalid_argument("batch must be >= 1");
  const bool stochastic = config.variant != Variant::kLMC;
  if (stochastic && oracle == nullptr)
    throw std::invalid_argument("stochastic chain variants require an oracle");
  if (x0.size() != target.dim)
    throw std::invalid_argument("x0 dimension does not match the target");

  Trajectory out;
  out.eta = config.step;
  out.variant = config.variant;
  if (target.lsi_constant && oracle != nullptr && oracle->smoothness_l > 0.0) {
    double ceiling =
        *target.lsi_constant / (6.0 * oracle->smoothness_l * oracle->smoothness_l);
    if (config.step > ceiling) {
      out.warnings.push_back("eta exceeds lsi/(6 L^2) = " + std::to_string(ceiling) +
                             "; the LSI convergence bound does not apply");
    }
  }

  const int d = target.dim;
  const int est_batch =
      config.estimator_batch > 0 ? config.estimator_batch : config.batch;
  Eigen::VectorXd x = x0;
  out.iterates.reserve(config.horizon + 1);
  out.records.reserve(config.horizon);
  out.iterates.push_back(x);

  for (long k = 0; k < config.horizon; ++k) {
    auto idx_eng = rng::engine_for(config.seed, rng::Stream::kBatchIndices, k);
    auto gauss_eng = rng::engine_for(config.seed, rng::Stream::kGaussian, k);

    StepRecord rec;
    Eigen::VectorXd grad_exact = target.gradient(x);
    Eigen::VectorXd g;
    switch (config.variant) {
      case Variant::kLMC: {
        rec.batch_used = 0;
        g = grad_exact;
        break;
      }
      case Variant::kSGLD:
      case Variant::kCCSGLD: {
        rec.batch_used = config.batch;
        g = mean_of(oracle->draw(x, config.batch, idx_eng));
        break;
      }
      case Variant::kABSGLD: {
        if (!oracle->component_count)
          throw std::invalid_argument("ABSGLD requires a finite-sum oracle");
        long bk = absgld_batch_size(x, oracle->growth_m, oracle->growth_g,
                                    *oracle->component_count);
        rec.batch_used = static_cast<int>(bk);
        g = mean_of(oracle->draw(x, static_cast<int>(bk), idx_eng));
        break;
      }
    }

    rec.gauss = rng::standard_normal(d, gauss_eng);
    rec.grad_estimate = g;
    rec.noise = g - grad_exact;
    rec.correction = Eigen::VectorXd::Zero(d);

    if (config.variant == Variant::kCCSGLD) {
      auto est_eng = rng::engine_for(config.seed, rng::Stream::kEstimatorIndices, k);
      auto fresh = oracle->draw(x, 2 * est_batch, est_eng);
      std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> pairs;
      pairs.reserve(est_batch);
      for (int j = 0; j < est_batch; ++j)
        pairs.emplace_back(fresh[2 * j], fresh[2 * j + 1]);
      CovEstimate est = ccsgld_covariance_estimate(
          x, pairs, config.step, config.batch, oracle->growth_m,
          oracle->growth_g, d);
      rec.corrected = !est.is_zero();
      rec.correction = est.apply(rec.gauss);
      x = ccsgld_step_applied(x, g, config.step, rec.gauss, rec.correction);
    } else {
      x = update(x, g, config.step, rec.gauss);
    }

    out.records.push_back(std::move(rec));
    out.iterates.push_back(x);
  }
  return out;
}

std::vector<Eigen::VectorXd> replay_trajectory(const Eigen::VectorXd& x0,
                                               const Trajectory& trajectory) {
  std::vector<Eigen::VectorXd> iterates;
  iterates.reserve(trajectory.records.size() + 1);
  Eigen::VectorXd x = x0;
  iterates.push_back(x);
  for (const auto& rec : trajectory.records) {
    if (trajectory.variant == Variant::kCCSGLD) {
      x = ccsgld_step_applied(x, rec.grad_estimate, trajectory.eta, rec.gauss,
                              rec.correction);
    } else {
      x = update(x, rec.grad_estimate, trajectory.eta, rec.gauss);
    }
    iterates.push_back(x);
  }
  return iterates;
}

Eigen::VectorXd sample_averaged_law_at(const targets::TargetSpec& target,
                                       const targets::StochasticOracle* oracle,
                                       const ChainConfig& config,
                                       const Eigen::VectorXd& x0, double tbar,
                                       rng::SplitMix64& eng) {
  check_eta(config.step);
  if (tbar < 0.0 || tbar > config.step * config.horizon + 1e-12)
    throw std::invalid_argument("tbar outside [0, K eta]");
  long k0 = std::min<long>(config.horizon,
                           static_cast<long>(std::floor(tbar / config.step)));
  double partial = tbar - config.step * static_cast<double>(k0);
  if (partial < 0.0) partial = 0.0;

  ChainConfig prefix = config;
  prefix.horizon = k0;
  Trajectory traj = run_chain(target, oracle, prefix, x0);
  Eigen::VectorXd x = traj.iterates.back();
  if (partial == 0.0) return x;

  // Stochastic gradient of the partial step, drawn from step k0's index slot.
  auto idx_eng = rng::engine_for(config.seed, rng::Stream::kBatchIndices, k0);
  Eigen::VectorXd g;
  if (config.variant == Variant::kLMC) {
    g = target.gradient(x);
  } else {
    int b = config.batch;
    if (config.variant == Variant::kABSGLD) {
      b = static_cast<int>(absgld_batch_size(x, oracle->growth_m,
                                             oracle->growth_g,
                                             *oracle->component_count));
    }
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(target.dim);
    for (const auto& v : oracle->draw(x, b, idx_eng)) sum += v;
    g = sum / static_cast<double>(b);
  }
  Eigen::VectorXd z = rng::standard_normal(target.dim, eng);
  return x - partial * g + std::sqrt(2.0 * partial) * z;
}

Eigen::VectorXd sample_averaged_law(const targets::TargetSpec& target,
                                    const targets::StochasticOracle* oracle,
                                    const ChainConfig& config,
                                    const Eigen::VectorXd& x0,
                                    rng::SplitMix64& eng) {
  double tbar = rng::uniform_real(0.0, config.step * config.horizon, eng);
  return sample_averaged_law_at(target, oracle, config, x0, tbar, eng);
}

}  // namespace sgmcmc::samplers
