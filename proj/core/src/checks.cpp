#include "sgmcmc/checks.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "sgmcmc/cltlab.hpp"
#include "sgmcmc/metrics.hpp"
#include "sgmcmc/rng.hpp"
#include "sgmcmc/targets.hpp"

namespace sgmcmc::checks {

namespace {

std::pair<targets::TargetSpec, targets::StochasticOracle> symmetric_oracle() {
  Eigen::VectorXd a(1), b(1);
  a[0] = -1.0;
  b[0] = 1.0;
  return targets::make_finite_sum_quadratic({a, b}, 1.0);
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

CheckResult check_scaling_uncorrected(std::vector<double>* kl_out) {
  auto [target, oracle] = symmetric_oracle();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(1);
  const double eta = 0.05;
  std::vector<std::pair<double, double>> pts;
  for (int b : {1, 2, 4, 8, 16}) {
    auto law = cltlab::enumerate_noise_law(oracle, x, b);
    double kl = cltlab::per_step_noise_kl(law, eta, false, 0.0);
    pts.emplace_back(b, kl);
    if (kl_out) kl_out->push_back(kl);
  }
  double slope = cltlab::fit_batch_scaling(pts);
  CheckResult r;
  r.name = "noise-kl-scaling-uncorrected";
  r.pass = slope >= -2.3 && slope <= -1.7;
  r.detail = "slope=" + fmt(slope) + " target=[-2.3,-1.7]";
  return r;
}

CheckResult check_scaling_corrected(const std::vector<double>& kl_uncorrected) {
  auto [target, oracle] = symmetric_oracle();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(1);
  const double eta = 0.05;
  std::vector<std::pair<double, double>> pts;
  bool dominated = true;
  int i = 0;
  for (int b : {1, 2, 4, 8, 16}) {
    auto law = cltlab::enumerate_noise_law(oracle, x, b);
    double kl = cltlab::per_step_noise_kl(law, eta, true, law.variance_1d());
    pts.emplace_back(b, kl);
    if (!(kl < kl_uncorrected[i])) dominated = false;
    ++i;
  }
  double slope = cltlab::fit_batch_scaling(pts);
  CheckResult r;
  r.name = "noise-kl-scaling-corrected";
  r.pass = slope <= -2.6 && dominated;
  r.detail = "slope=" + fmt(slope) + " target<=-2.6 dominated=" +
             (dominated ? "yes" : "no");
  return r;
}

CheckResult check_covariance_mismatch() {
  auto eng = rng::SplitMix64(rng::derive(20240503, {3}));
  bool ok = true;
  double worst_gap = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    int d = 1 + static_cast<int>(rng::uniform_index(6, eng));
    Eigen::MatrixXd a(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) a(i, j) = rng::uniform_real(-1.0, 1.0, eng);
    Eigen::MatrixXd sigma = a * a.transpose();
    double tr = sigma.trace();
    double target_tr = rng::uniform_real(0.01, 1.0, eng);
    sigma *= target_tr / tr;
    double v = metrics::covariance_mismatch_w2sq(sigma);
    double cap = 0.25 * target_tr * target_tr;
    worst_gap = std::max(worst_gap, v - cap);
    if (v > cap * (1.0 + 1e-12)) ok = false;
  }
  // one-dimensional identity against the Bures distance
  double worst_id = 0.0;
  for (double s2 : {0.1, 0.5, 1.0, 2.0, 3.0}) {
    Eigen::MatrixXd sigma(1, 1);
    sigma(0, 0) = s2;
    double lhs = metrics::covariance_mismatch_w2sq(sigma);
    metrics::GaussianLaw p(Eigen::VectorXd::Zero(1),
                           Eigen::MatrixXd::Constant(1, 1, 1.0 + s2));
    metrics::GaussianLaw q(Eigen::VectorXd::Zero(1),
                           Eigen::MatrixXd::Identity(1, 1));
    double w2 = metrics::gaussian_w2(p, q);
    worst_id = std::max(worst_id, std::abs(lhs - w2 * w2));
  }
  CheckResult r;
  r.name = "covariance-mismatch-identity";
  r.pass = ok && worst_id <= 1e-12;
  r.detail = "max(value - Tr^2/4)=" + fmt(worst_gap) +
             " 1d-identity-err=" + fmt(worst_id);
  return r;
}

CheckResult check_chi_square_mc() {
  auto eng = rng::SplitMix64(rng::derive(20240503, {4}));
  const long samples = 10'000'000;
  bool ok = true;
  double worst_z = 0.0;
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    int d = 1 + static_cast<int>(rng::uniform_index(3, eng));
    double sigma2 = rng::uniform_real(0.5, 2.0, eng);
    Eigen::VectorXd mu1(d), mu2(d);
    for (int i = 0; i < d; ++i) {
      mu1[i] = rng::uniform_real(-1.0, 1.0, eng);
      mu2[i] = rng::uniform_real(-1.0, 1.0, eng);
    }
    // keep the ratio moderate so the Monte-Carlo variance stays finite
    double r2 = (mu1 - mu2).squaredNorm() / sigma2;
    if (r2 > 1.5) {
      mu2 = mu1 + (mu2 - mu1) * std::sqrt(1.5 / r2);
    }
    double closed = metrics::gaussian_chi_square(mu1, mu2, sigma2);
    double sd = std::sqrt(sigma2);
    double mean_w2 = 0.0, mean_w4 = 0.0;
    for (long s = 0; s < samples; ++s) {
      double expo = 0.0;
      for (int i = 0; i < d; ++i) {
        double x = mu2[i] + sd * normal(eng);
        double a1 = x - mu1[i], a2 = x - mu2[i];
        expo += (a2 * a2 - a1 * a1);
      }
      double w = std::exp(expo / (2.0 * sigma2));
      mean_w2 += w * w;
      mean_w4 += w * w * w * w;
    }
    mean_w2 /= samples;
    mean_w4 /= samples;
    double se = std::sqrt(std::max(mean_w4 - mean_w2 * mean_w2, 0.0) / samples);
    double z = std::abs(mean_w2 - 1.0 - closed) / std::max(se, 1e-300);
    worst_z = std::max(worst_z, z);
    if (z > 3.0) ok = false;
  }
  CheckResult r;
  r.name = "gaussian-chi-square-mc";
  r.pass = ok;
  r.detail = "max|z|=" + fmt(worst_z) + " limit=3";
  return r;
}

CheckResult check_wass_clt() {
  bool ok = true;
  double prev = std::numeric_limits<double>::infinity();
  std::ostringstream detail;
  for (int b : {4, 16, 64}) {
    cltlab::CltExperimentConfig cfg;
    cfg.beta = std::sqrt(0.1);
    cfg.batch = b;
    cfg.dim = 1;
    auto res = cltlab::wass_clt_experiment(cfg);
    if (!(res.measured_w2sq <= res.bound)) ok = false;
    if (!(res.measured_w2sq <= prev)) ok = false;
    prev = res.measured_w2sq;
    detail << "B=" << b << ":" << fmt(res.measured_w2sq) << "<=" << fmt(res.bound)
           << " ";
  }
  CheckResult r;
  r.name = "wasserstein-clt-inequality";
  r.pass = ok;
  r.detail = detail.str();
  return r;
}

CheckResult check_zhai_clt() {
  bool ok = true;
  std::ostringstream detail;
  for (int b : {1, 4, 16}) {
    cltlab::CltExperimentConfig cfg;
    cfg.beta = std::sqrt(0.1);
    cfg.batch = b;
    cfg.dim = 1;
    auto res = cltlab::zhai_clt_experiment(cfg);
    if (!(res.measured_w2sq <= res.bound)) ok = false;
    detail << "B=" << b << ":" << fmt(res.measured_w2sq) << "<=" << fmt(res.bound)
           << " ";
  }
  CheckResult r;
  r.name = "zhai-clt-inequality";
  r.pass = ok;
  r.detail = detail.str();
  return r;
}

CheckResult check_conditional_energy() {
  auto [target, oracle] = symmetric_oracle();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(1);
  bool ok = true;
  std::ostringstream detail;
  for (int b : {1, 2, 4}) {
    auto lo = cltlab::conditional_noise_energy(oracle, x, b, 0.01);
    auto hi = cltlab::conditional_noise_energy(oracle, x, b, 0.02);
    if (!(lo.measured <= lo.bound) || !(hi.measured <= hi.bound)) ok = false;
    double ratio = hi.measured / lo.measured;
    if (!(ratio >= 1.5 && ratio <= 2.5)) ok = false;
    detail << "B=" << b << ":ratio=" << fmt(ratio) << " ";
  }
  CheckResult r;
  r.name = "conditional-noise-energy";
  r.pass = ok;
  r.detail = detail.str();
  return r;
}

CheckResult check_cov_estimator() {
  auto [target, oracle] = symmetric_oracle();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(1);
  bool ok = true;
  std::ostringstream detail;
  for (int best : {1, 4}) {
    auto eng = rng::SplitMix64(rng::derive(20240503, {7, (std::uint64_t)best}));
    auto rep = cltlab::cov_estimator_check(oracle, x, 2, best, 100000, eng);
    if (!rep.all_ok()) ok = false;
    detail << "B'=" << best << ":" << (rep.all_ok() ? "ok" : "FAIL") << " ";
  }
  CheckResult r;
  r.name = "covariance-estimator-guarantees";
  r.pass = ok;
  r.detail = detail.str();
  return r;
}

}  // namespace

std::vector<CheckResult> run_lemma_checks() {
  std::vector<CheckResult> out;
  std::vector<double> kl_uncorrected;
  out.push_back(check_scaling_uncorrected(&kl_uncorrected));
  out.push_back(check_scaling_corrected(kl_uncorrected));
  out.push_back(check_covariance_mismatch());
  out.push_back(check_chi_square_mc());
  out.push_back(check_wass_clt());
  out.push_back(check_zhai_clt());
  out.push_back(check_conditional_energy());
  out.push_back(check_cov_estimator());
  return out;
}

}  // namespace sgmcmc::checks
