#include "sgmcmc/targets.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

namespace sgmcmc::targets {

namespace {

double log_sum_exp(const std::vector<double>& v) {
  double m = v[0];
  for (double x : v) m = std::max(m, x);
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

// E||x|| for x ~ N(0, v I_d): sqrt(2v) Gamma((d+1)/2) / Gamma(d/2).
double gaussian_mean_norm(int d, double v) {
  double lg = std::lgamma(0.5 * (d + 1)) - std::lgamma(0.5 * d);
  return std::sqrt(2.0 * v) * std::exp(lg);
}

}  // namespace

MomentProfile::MomentProfile(std::vector<double> constants)
    : constants_(std::move(constants)) {
  if (constants_.empty()) throw std::invalid_argument("MomentProfile: empty");
  double prev = -1.0;
  for (double c : constants_) {
    if (c < 0.0) throw std::invalid_argument("MomentProfile: negative C_q");
    if (c < prev) throw std::invalid_argument("MomentProfile: C_q must be nondecreasing");
    prev = c;
  }
}

double MomentProfile::at(int q) const {
  if (q < 0 || q >= static_cast<int>(constants_.size()))
    throw std::out_of_range("MomentProfile: order out of range");
  return constants_[q];
}

TargetSpec make_gaussian_target(int d, double variance) {
  if (d < 1) throw std::invalid_argument("make_gaussian_target: d must be >= 1");
  if (!(variance > 0.0))
    throw std::invalid_argument("make_gaussian_target: variance must be > 0");
  TargetSpec t;
  t.dim = d;
  t.potential = [variance](const Eigen::VectorXd& x) {
    return x.squaredNorm() / (2.0 * variance);
  };
  t.gradient = [variance](const Eigen::VectorXd& x) {
    return Eigen::VectorXd(x / variance);
  };
  t.lsi_constant = 1.0 / variance;
  t.pi_constant = 1.0 / variance;
  t.m1 = gaussian_mean_norm(d, variance);
  t.m2 = std::sqrt(variance * d);
  return t;
}

std::pair<TargetSpec, StochasticOracle> make_finite_sum_quadratic(
    const std::vector<Eigen::VectorXd>& centers, double curvature) {
  if (centers.empty())
    throw std::invalid_argument("make_finite_sum_quadratic: empty center list");
  if (!(curvature > 0.0))
    throw std::invalid_argument("make_finite_sum_quadratic: curvature must be > 0");
  const long n = static_cast<long>(centers.size());
  const int d = static_cast<int>(centers[0].size());
  for (const auto& c : centers) {
    if (c.size() != d)
      throw std::invalid_argument("make_finite_sum_quadratic: center dimension mismatch");
    if (!c.allFinite())
      throw std::invalid_argument("make_finite_sum_quadratic: non-finite center");
  }
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
  for (const auto& c : centers) mean += c;
  mean /= static_cast<double>(n);

  double max_dev = 0.0;
  for (const auto& c : centers) max_dev = std::max(max_dev, (c - mean).norm());

  const double a = curvature;
  auto shared_centers = std::make_shared<std::vector<Eigen::VectorXd>>(centers);

  TargetSpec t;
  t.dim = d;
  t.potential = [shared_centers, a, n](const Eigen::VectorXd& x) {
    double s = 0.0;
    for (const auto& c : *shared_centers) s += (x - c).squaredNorm();
    return 0.5 * a * s / static_cast<double>(n);
  };
  t.gradient = [mean, a](const Eigen::VectorXd& x) {
    return Eigen::VectorXd(a * (x - mean));
  };
  // Target is N(mean, I/a); shifted mean leaves the functional constants intact.
  t.lsi_constant = a;
  t.pi_constant = a;
  t.m2 = std::sqrt(static_cast<double>(d) / a);

  StochasticOracle o;
  o.component_count = n;
  o.component = [shared_centers, a](long i, const Eigen::VectorXd& x) {
    return Eigen::VectorXd(a * (x - (*shared_centers)[i]));
  };
  o.mean_gradient = t.gradient;
  o.draw = [shared_centers, a, n](const Eigen::VectorXd& x, int batch,
                                  rng::SplitMix64& eng) {
    if (batch < 1) throw std::invalid_argument("oracle draw: batch must be >= 1");
    std::vector<Eigen::VectorXd> out;
    out.reserve(batch);
    for (int j = 0; j < batch; ++j) {
      long i = rng::uniform_index(n, eng);
      out.emplace_back(a * (x - (*shared_centers)[i]));
    }
    return out;
  };
  o.growth_m = 0.0;
  o.growth_g = a * max_dev;
  o.smoothness_l = a;
  o.holder_s = 1.0;
  return {t, o};
}

TargetSpec make_mixture_target(const std::vector<MixtureMode>& modes) {
  if (modes.empty()) throw std::invalid_argument("make_mixture_target: no modes");
  const int d = static_cast<int>(modes[0].mean.size());
  double wsum = 0.0;
  for (const auto& m : modes) {
    if (!(m.weight > 0.0))
      throw std::invalid_argument("make_mixture_target: nonpositive weight");
    if (!(m.variance > 0.0))
      throw std::invalid_argument("make_mixture_target: nonpositive variance");
    if (m.mean.size() != d)
      throw std::invalid_argument("make_mixture_target: mode dimension mismatch");
    wsum += m.weight;
  }
  if (std::abs(wsum - 1.0) > 1e-9)
    throw std::invalid_argument("make_mixture_target: weights must sum to 1");

  auto shared = std::make_shared<std::vector<MixtureMode>>(modes);
  auto log_terms = [shared, d](const Eigen::VectorXd& x) {
    std::vector<double> lt;
    lt.reserve(shared->size());
    for (const auto& m : *shared) {
      double q = (x - m.mean).squaredNorm() / (2.0 * m.variance);
      lt.push_back(std::log(m.weight) - q -
                   0.5 * d * std::log(2.0 * M_PI * m.variance));
    }
    return lt;
  };

  TargetSpec t;
  t.dim = d;
  t.potential = [log_terms](const Eigen::VectorXd& x) {
    return -log_sum_exp(log_terms(x));
  };
  t.gradient = [shared, log_terms, d](const Eigen::VectorXd& x) {
    std::vector<double> lt = log_terms(x);
    double lse = log_sum_exp(lt);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(d);
    for (std::size_t i = 0; i < shared->size(); ++i) {
      double resp = std::exp(lt[i] - lse);
      g += resp * (x - (*shared)[i].mean) / (*shared)[i].variance;
    }
    return g;
  };
  return t;
}

bool check_growth(const StochasticOracle& oracle,
                  const std::vector<Eigen::VectorXd>& points, long draws,
                  rng::SplitMix64& eng) {
  const double slack = 1.0 + 1e-12;
  for (const auto& x : points) {
    if (!x.allFinite()) throw std::invalid_argument("check_growth: non-finite point");
    Eigen::VectorXd grad = oracle.mean_gradient(x);
    double bound = oracle.growth_m * x.norm() + oracle.growth_g;
    for (long k = 0; k < draws; ++k) {
      auto g = oracle.draw(x, 1, eng);
      if ((g[0] - grad).norm() > bound * slack) return false;
    }
  }
  return true;
}

}  // namespace sgmcmc::targets
