#include "sgmcmc/cltlab.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sgmcmc::cltlab {

namespace {

constexpr double kHalfLog2Pi = 0.9189385332046727;  // log(2 pi) / 2

double log_normal_pdf(double x, double mean, double sd) {
  double z = (x - mean) / sd;
  return -0.5 * z * z - std::log(sd) - kHalfLog2Pi;
}

double normal_cdf(double x, double mean, double sd) {
  return 0.5 * std::erfc(-(x - mean) / (sd * M_SQRT2));
}

struct ScalarLaw {
  std::vector<double> atoms;    // sorted ascending
  std::vector<double> weights;
};

ScalarLaw merge_scalar(std::vector<std::pair<double, double>> entries) {
  std::sort(entries.begin(), entries.end());
  ScalarLaw law;
  for (const auto& [a, w] : entries) {
    if (!law.atoms.empty() &&
        std::abs(a - law.atoms.back()) <= 1e-12 * (1.0 + std::abs(a))) {
      law.weights.back() += w;
    } else {
      law.atoms.push_back(a);
      law.weights.push_back(w);
    }
  }
  return law;
}

// Law of the sum of `fold` i.i.d. copies of the base law.
ScalarLaw convolve_sum(const ScalarLaw& base, int fold) {
  ScalarLaw acc{{0.0}, {1.0}};
  for (int b = 0; b < fold; ++b) {
    std::vector<std::pair<double, double>> entries;
    entries.reserve(acc.atoms.size() * base.atoms.size());
    for (std::size_t i = 0; i < acc.atoms.size(); ++i)
      for (std::size_t j = 0; j < base.atoms.size(); ++j)
        entries.emplace_back(acc.atoms[i] + base.atoms[j],
                             acc.weights[i] * base.weights[j]);
    if (entries.size() > (std::size_t)4'000'000)
      throw std::length_error("noise-law convolution exceeded its size budget");
    acc = merge_scalar(std::move(entries));
  }
  return acc;
}

// Gaussian mixture with a shared standard deviation.
struct Mixture {
  std::vector<double> means;
  std::vector<double> weights;
  double sd = 1.0;

  double log_density(double x) const {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < means.size(); ++m) {
      best = std::max(best, std::log(weights[m]) + log_normal_pdf(x, means[m], sd));
    }
    double s = 0.0;
    for (std::size_t m = 0; m < means.size(); ++m)
      s += std::exp(std::log(weights[m]) + log_normal_pdf(x, means[m], sd) - best);
    return best + std::log(s);
  }

  double cdf(double x) const {
    double s = 0.0;
    for (std::size_t m = 0; m < means.size(); ++m)
      s += weights[m] * normal_cdf(x, means[m], sd);
    return s;
  }
};

// Walks ascending quantile levels of a continuous monotone CDF by bracketed
// bisection, reusing the previous solution as the lower bracket.
class QuantileWalker {
 public:
  QuantileWalker(std::function<double(double)> cdf, double start)
      : cdf_(std::move(cdf)), x_(start) {}

  double advance(double u) {
    double lo = x_;
    double step = 0.25;
    double hi = lo + step;
    while (cdf_(hi) < u) {
      lo = hi;
      step *= 2.0;
      hi = lo + step;
      if (hi > 1e6) throw std::runtime_error("quantile walker ran away");
    }
    for (int it = 0; it < 200; ++it) {
      double mid = 0.5 * (lo + hi);
      if (hi - lo <= 1e-13 * (1.0 + std::abs(mid))) break;
      if (cdf_(mid) < u) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    x_ = lo;
    return 0.5 * (lo + hi);
  }

 private:
  std::function<double(double)> cdf_;
  double x_;
};

// W2^2 between a continuous law (given by its CDF) and the discrete-or-
// continuous comparison quantile function, on the midpoint quantile grid.
double quantile_coupling_w2sq(const std::function<double(double)>& cdf_a,
                              double start_a,
                              const std::function<double(double)>& quantile_b,
                              long points) {
  QuantileWalker walker(cdf_a, start_a);
  double acc = 0.0;
  for (long i = 0; i < points; ++i) {
    double u = (static_cast<double>(i) + 0.5) / static_cast<double>(points);
    double qa = walker.advance(u);
    double diff = qa - quantile_b(u);
    acc += diff * diff;
  }
  return acc / static_cast<double>(points);
}

ScalarLaw base_law_for(const CltExperimentConfig& config) {
  if (!(config.beta > 0.0))
    throw std::invalid_argument("clt experiment: beta must be > 0");
  if (config.dim != 1)
    throw std::invalid_argument(
        "clt experiment: exact transport is implemented for d = 1 only");
  if (config.batch < 1) throw std::invalid_argument("clt experiment: B >= 1");

  if (config.family == SummandFamily::kRademacherScaled) {
    return ScalarLaw{{-config.beta, config.beta}, {0.5, 0.5}};
  }
  if (config.atoms.empty() || config.atoms.size() != config.atom_weights.size())
    throw std::invalid_argument("clt experiment: finite-sum family needs atoms");
  double mean = 0.0, wsum = 0.0, max_abs = 0.0;
  for (std::size_t i = 0; i < config.atoms.size(); ++i) {
    mean += config.atoms[i] * config.atom_weights[i];
    wsum += config.atom_weights[i];
    max_abs = std::max(max_abs, std::abs(config.atoms[i]));
  }
  if (std::abs(wsum - 1.0) > 1e-9 || std::abs(mean) > 1e-9)
    throw std::invalid_argument("clt experiment: atoms must be a zero-mean law");
  double scale = config.beta / max_abs;
  ScalarLaw law;
  for (std::size_t i = 0; i < config.atoms.size(); ++i) {
    law.atoms.push_back(config.atoms[i] * scale);
    law.weights.push_back(config.atom_weights[i]);
  }
  return law;
}

double law_variance(const ScalarLaw& law) {
  double v = 0.0;
  for (std::size_t i = 0; i < law.atoms.size(); ++i)
    v += law.weights[i] * law.atoms[i] * law.atoms[i];
  return v;
}

// Law of Y = B^{-1/2} sum of B i.i.d. base draws.
ScalarLaw normalized_sum_law(const ScalarLaw& base, int batch) {
  ScalarLaw sum = convolve_sum(base, batch);
  double scale = 1.0 / std::sqrt(static_cast<double>(batch));
  for (double& a : sum.atoms) a *= scale;
  return sum;
}

double std_normal_quantile_grid_w2sq(const Mixture& mix, double ref_sd,
                                     long points) {
  // Quantiles of the reference normal via a second walker.
  auto ref_cdf = [ref_sd](double x) { return normal_cdf(x, 0.0, ref_sd); };
  QuantileWalker ref_walker(ref_cdf, -20.0 * ref_sd - 1.0);
  std::vector<double> ref_q(points);
  for (long i = 0; i < points; ++i) {
    double u = (static_cast<double>(i) + 0.5) / static_cast<double>(points);
    ref_q[i] = ref_walker.advance(u);
  }
  long idx = 0;
  auto ref_quantile = [&](double) { return ref_q[idx++]; };
  double lo_start = *std::min_element(mix.means.begin(), mix.means.end()) -
                    20.0 * mix.sd - 1.0;
  return quantile_coupling_w2sq([&](double x) { return mix.cdf(x); }, lo_start,
                                ref_quantile, points);
}

}  // namespace

std::vector<double> NoiseLawExact::scalar_atoms() const {
  if (dim() != 1) throw std::invalid_argument("NoiseLawExact: not one-dimensional");
  std::vector<double> out;
  out.reserve(atoms.size());
  for (const auto& a : atoms) out.push_back(a[0]);
  return out;
}

double NoiseLawExact::variance_1d() const {
  std::vector<double> a = scalar_atoms();
  double v = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) v += weights[i] * a[i] * a[i];
  return v;
}

NoiseLawExact enumerate_noise_law(const targets::StochasticOracle& oracle,
                                  const Eigen::VectorXd& x, int batch) {
  if (batch < 1) throw std::invalid_argument("enumerate_noise_law: batch >= 1");
  if (!oracle.component_count || !oracle.component)
    throw std::invalid_argument("enumerate_noise_law: needs a finite-sum oracle");
  const long n = *oracle.component_count;
  const int d = static_cast<int>(x.size());

  Eigen::VectorXd grad = oracle.mean_gradient(x);
  std::vector<Eigen::VectorXd> deviations;
  deviations.reserve(n);
  for (long i = 0; i < n; ++i) deviations.push_back(oracle.component(i, x) - grad);

  double tuples = std::pow(static_cast<double>(n), batch);
  NoiseLawExact law;

  if (tuples <= 1e6) {
    // Full n^B enumeration; atoms are averaged tuples, then deduplicated.
    std::vector<std::pair<Eigen::VectorXd, double>> raw;
    raw.reserve(static_cast<std::size_t>(tuples));
    std::vector<long> idx(batch, 0);
    const double w = std::pow(1.0 / static_cast<double>(n), batch);
    while (true) {
      Eigen::VectorXd sum = Eigen::VectorXd::Zero(d);
      for (long j : idx) sum += deviations[j];
      raw.emplace_back(sum / static_cast<double>(batch), w);
      int pos = 0;
      while (pos < batch) {
        if (++idx[pos] < n) break;
        idx[pos] = 0;
        ++pos;
      }
      if (pos == batch) break;
    }
    std::sort(raw.begin(), raw.end(),
              [](const auto& a, const auto& b) {
                for (int c = 0; c < a.first.size(); ++c) {
                  if (a.first[c] != b.first[c]) return a.first[c] < b.first[c];
                }
                return false;
              });
    for (auto& [atom, weight] : raw) {
      bool merged = false;
      if (!law.atoms.empty()) {
        const Eigen::VectorXd& prev = law.atoms.back();
        if (((atom - prev).cwiseAbs().array() <=
             1e-12 * (1.0 + atom.cwiseAbs().array()))
                .all()) {
          law.weights.back() += weight;
          merged = true;
        }
      }
      if (!merged) {
        law.atoms.push_back(atom);
        law.weights.push_back(weight);
      }
    }
    return law;
  }

  if (d != 1)
    throw std::length_error(
        "enumerate_noise_law: n^B exceeds the enumeration budget and the "
        "convolution path needs d = 1");

  ScalarLaw base;
  {
    std::vector<std::pair<double, double>> entries;
    for (const auto& v : deviations)
      entries.emplace_back(v[0], 1.0 / static_cast<double>(n));
    base = merge_scalar(std::move(entries));
  }
  ScalarLaw sum = convolve_sum(base, batch);
  for (std::size_t i = 0; i < sum.atoms.size(); ++i) {
    Eigen::VectorXd a(1);
    a[0] = sum.atoms[i] / static_cast<double>(batch);
    law.atoms.push_back(a);
    law.weights.push_back(sum.weights[i]);
  }
  return law;
}

double per_step_noise_kl(const NoiseLawExact& law, double eta, bool corrected,
                         double sigma_hat) {
  if (eta < 0.0) throw std::invalid_argument("per_step_noise_kl: eta must be >= 0");
  std::vector<double> atoms = law.scalar_atoms();
  double sd = 1.0;
  if (corrected) {
    if (!(eta * sigma_hat < 2.0))
      throw std::invalid_argument("per_step_noise_kl: requires eta*sigma_hat < 2");
    sd = 1.0 - eta * sigma_hat / 4.0;
  }

  const double shift = std::sqrt(eta / 2.0);
  double max_abs_mean = 0.0;
  Mixture mix;
  mix.sd = sd;
  mix.weights = law.weights;
  mix.means.reserve(atoms.size());
  for (double a : atoms) {
    mix.means.push_back(shift * a);
    max_abs_mean = std::max(max_abs_mean, std::abs(shift * a));
  }
  if (max_abs_mean == 0.0 && sd == 1.0) return 0.0;  // the mixture is N(0,1)

  const double half_width = 10.0 + max_abs_mean;
  const int points = 20001;
  const double h = 2.0 * half_width / (points - 1);
  double acc = 0.0;
  for (int i = 0; i < points; ++i) {
    double x = -half_width + h * i;
    double lp = mix.log_density(x);
    double lq = log_normal_pdf(x, 0.0, 1.0);
    double f = std::exp(lp) * (lp - lq);
    double w = (i == 0 || i == points - 1) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    acc += w * f;
  }
  return std::max(acc * h / 3.0, 0.0);
}

double fit_batch_scaling(const std::vector<std::pair<double, double>>& kl_by_batch) {
  if (kl_by_batch.size() < 4)
    throw std::invalid_argument("fit_batch_scaling: need at least 4 batch sizes");
  std::vector<double> xs, ys;
  for (const auto& [b, kl] : kl_by_batch) {
    if (!(b > 0.0)) throw std::invalid_argument("fit_batch_scaling: B must be > 0");
    if (!(kl > 0.0)) throw std::domain_error("fit_batch_scaling: nonpositive KL value");
    xs.push_back(std::log(b));
    ys.push_back(std::log(kl));
  }
  for (std::size_t i = 2; i < xs.size(); ++i) {
    if (std::abs((xs[i] - xs[i - 1]) - (xs[1] - xs[0])) > 1e-9)
      throw std::invalid_argument("fit_batch_scaling: batch sizes must be geometric");
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= xs.size();
  my /= ys.size();
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    num += (xs[i] - mx) * (ys[i] - my);
    den += (xs[i] - mx) * (xs[i] - mx);
  }
  return num / den;
}

CltResult wass_clt_experiment(const CltExperimentConfig& config) {
  ScalarLaw base = base_law_for(config);
  double beta2 = config.beta * config.beta;
  double sigma_y = law_variance(base);
  if (beta2 > 0.2 + 1e-12)
    throw std::invalid_argument("wass_clt_experiment: needs beta^2 <= 1/5");
  if (sigma_y > 1.0 / (5.0 * config.dim) + 1e-12)
    throw std::invalid_argument("wass_clt_experiment: needs ||Sigma_Y|| <= 1/(5d)");

  ScalarLaw ylaw = normalized_sum_law(base, config.batch);
  Mixture mix;
  mix.sd = std::sqrt(1.0 - sigma_y);
  mix.means = ylaw.atoms;
  mix.weights = ylaw.weights;

  CltResult out;
  out.measured_w2sq = std_normal_quantile_grid_w2sq(mix, 1.0, config.quantile_points);
  double lb = 1.0 + std::log(static_cast<double>(config.batch));
  out.bound = 25.0 * std::pow(config.beta, 6) * config.dim * lb * lb /
              static_cast<double>(config.batch);
  return out;
}

CltResult zhai_clt_experiment(const CltExperimentConfig& config) {
  ScalarLaw base = base_law_for(config);
  double sigma_y = law_variance(base);
  ScalarLaw ylaw = normalized_sum_law(base, config.batch);

  // Quantile function of the discrete law of Y.
  std::vector<double> cum(ylaw.weights.size());
  double run = 0.0;
  for (std::size_t i = 0; i < ylaw.weights.size(); ++i) {
    run += ylaw.weights[i];
    cum[i] = run;
  }
  auto discrete_quantile = [&](double u) {
    auto it = std::lower_bound(cum.begin(), cum.end(), u);
    std::size_t i = std::min<std::size_t>(it - cum.begin(), cum.size() - 1);
    return ylaw.atoms[i];
  };

  double ref_sd = std::sqrt(sigma_y);
  auto ref_cdf = [ref_sd](double x) { return normal_cdf(x, 0.0, ref_sd); };

  CltResult out;
  out.measured_w2sq = quantile_coupling_w2sq(ref_cdf, -25.0 * ref_sd - 1.0,
                                             discrete_quantile,
                                             config.quantile_points);
  double lb = 1.0 + std::log(static_cast<double>(config.batch));
  out.bound = 25.0 * config.beta * config.beta * config.dim * lb * lb /
              static_cast<double>(config.batch);
  return out;
}

EnergyResult conditional_noise_energy(const targets::StochasticOracle& oracle,
                                      const Eigen::VectorXd& x, int batch,
                                      double lookahead, int grid_points) {
  if (lookahead < 0.0)
    throw std::invalid_argument("conditional_noise_energy: negative lookahead");
  if (x.size() != 1)
    throw std::invalid_argument("conditional_noise_energy: d = 1 only");
  if (grid_points < 3 || grid_points % 2 == 0)
    throw std::invalid_argument("conditional_noise_energy: odd grid size >= 3");

  const double u = oracle.growth_m * x.norm() + oracle.growth_g;
  EnergyResult out;
  out.bound = 576.0 * lookahead * std::pow(u, 4) /
              (static_cast<double>(batch) * static_cast<double>(batch));
  if (lookahead == 0.0) return out;  // x_t carries no information at h = 0

  NoiseLawExact law = enumerate_noise_law(oracle, x, batch);
  std::vector<double> atoms = law.scalar_atoms();
  const double h = lookahead;
  const double c = x[0] - h * oracle.mean_gradient(x)[0];
  const double sd = std::sqrt(2.0 * h);

  double max_abs = 0.0;
  for (double a : atoms) max_abs = std::max(max_abs, std::abs(a));
  const double lo = c - h * max_abs - 10.0 * sd;
  const double hi = c + h * max_abs + 10.0 * sd;
  const double dx = (hi - lo) / (grid_points - 1);

  // E[E[N|x_t]^2] = integral (sum_m w_m a_m phi_m)^2 / (sum_m w_m phi_m).
  double acc = 0.0;
  for (int i = 0; i < grid_points; ++i) {
    double t = lo + dx * i;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < atoms.size(); ++m) {
      double lm = std::log(law.weights[m]) + log_normal_pdf(t, c - h * atoms[m], sd);
      best = std::max(best, lm);
    }
    double den = 0.0, num = 0.0;
    for (std::size_t m = 0; m < atoms.size(); ++m) {
      double e = std::exp(std::log(law.weights[m]) +
                          log_normal_pdf(t, c - h * atoms[m], sd) - best);
      den += e;
      num += atoms[m] * e;
    }
    double f = std::exp(best) * num * num / den;
    double w = (i == 0 || i == grid_points - 1) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    acc += w * f;
  }
  out.measured = acc * dx / 3.0;
  return out;
}

CovCheckReport cov_estimator_check(const targets::StochasticOracle& oracle,
                                   const Eigen::VectorXd& x, int batch,
                                   int estimator_batch, long draws,
                                   rng::SplitMix64& eng) {
  if (draws < 1) throw std::invalid_argument("cov_estimator_check: draws >= 1");
  if (!oracle.component_count || !oracle.component)
    throw std::invalid_argument("cov_estimator_check: needs a finite-sum oracle");
  const long n = *oracle.component_count;
  const int d = static_cast<int>(x.size());

  Eigen::VectorXd grad = oracle.mean_gradient(x);
  Eigen::MatrixXd sigma_single = Eigen::MatrixXd::Zero(d, d);
  double max_dev = 0.0;
  for (long i = 0; i < n; ++i) {
    Eigen::VectorXd v = oracle.component(i, x) - grad;
    sigma_single += v * v.transpose() / static_cast<double>(n);
    max_dev = std::max(max_dev, v.norm());
  }
  Eigen::MatrixXd sigma = sigma_single / static_cast<double>(batch);

  const double coeff = 1.0 / (2.0 * batch * estimator_batch);
  Eigen::MatrixXd mean_est = Eigen::MatrixXd::Zero(d, d);
  Eigen::MatrixXd second_entry = Eigen::MatrixXd::Zero(d, d);  // E[entry^2]
  double tr2_mean = 0.0, tr2_sq = 0.0;
  const double trace_cap = 2.0 * max_dev * max_dev / static_cast<double>(batch);
  bool trace_ok = true;

  for (long it = 0; it < draws; ++it) {
    auto fresh = oracle.draw(x, 2 * estimator_batch, eng);
    std::vector<Eigen::VectorXd> diffs(estimator_batch);
    for (int j = 0; j < estimator_batch; ++j)
      diffs[j] = fresh[2 * j] - fresh[2 * j + 1];

    Eigen::MatrixXd gram(estimator_batch, estimator_batch);
    for (int a = 0; a < estimator_batch; ++a)
      for (int b = 0; b < estimator_batch; ++b) gram(a, b) = diffs[a].dot(diffs[b]);

    Eigen::MatrixXd est = Eigen::MatrixXd::Zero(d, d);
    for (const auto& dv : diffs) est += coeff * dv * dv.transpose();
    mean_est += est;
    second_entry += est.cwiseProduct(est);

    double tr1 = coeff * gram.trace();
    double tr2 = coeff * coeff * (gram * gram).trace();
    double tr3 = coeff * coeff * coeff * (gram * gram * gram).trace();
    tr2_mean += tr2;
    tr2_sq += tr2 * tr2;
    const double slack = 1.0 + 1e-12;
    if (tr1 > trace_cap * slack || tr2 > trace_cap * trace_cap * slack ||
        tr3 > trace_cap * trace_cap * trace_cap * slack) {
      trace_ok = false;
    }
  }

  const double dn = static_cast<double>(draws);
  mean_est /= dn;
  second_entry /= dn;
  tr2_mean /= dn;
  tr2_sq /= dn;

  CovCheckReport rep;
  rep.frobenius_error = (mean_est - sigma).norm();
  double var_sum = 0.0;
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      double var = std::max(second_entry(a, b) - mean_est(a, b) * mean_est(a, b), 0.0);
      var_sum += var / dn;
    }
  rep.frobenius_tolerance = 3.0 * std::sqrt(var_sum);
  rep.unbiased_ok = rep.frobenius_error <= rep.frobenius_tolerance;

  rep.second_moment_excess = tr2_mean - (sigma * sigma).trace();
  rep.second_moment_bound =
      4.0 * std::pow(max_dev, 4) /
      (static_cast<double>(batch) * batch * estimator_batch);
  rep.second_moment_tolerance =
      3.0 * std::sqrt(std::max(tr2_sq - tr2_mean * tr2_mean, 0.0) / dn);
  rep.second_moment_ok =
      rep.second_moment_excess <= rep.second_moment_bound + rep.second_moment_tolerance;
  rep.trace_bounds_ok = trace_ok;
  return rep;
}

}  // namespace sgmcmc::cltlab
