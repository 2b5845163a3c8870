#include <doctest.h>

#include <cmath>

#include "sgmcmc/cltlab.hpp"
#include "sgmcmc/targets.hpp"

using namespace sgmcmc;
using Eigen::VectorXd;

namespace {

VectorXd vec1(double x) {
  VectorXd v(1);
  v[0] = x;
  return v;
}

std::pair<targets::TargetSpec, targets::StochasticOracle> symmetric_pm1() {
  return targets::make_finite_sum_quadratic({vec1(-1.0), vec1(1.0)}, 1.0);
}

void check_law_invariants(const cltlab::NoiseLawExact& law) {
  double mass = 0.0;
  VectorXd mean = VectorXd::Zero(law.dim());
  for (std::size_t i = 0; i < law.atoms.size(); ++i) {
    mass += law.weights[i];
    mean += law.weights[i] * law.atoms[i];
  }
  CHECK(std::abs(mass - 1.0) <= 1e-12);
  CHECK(mean.norm() <= 1e-12);
}

}  // namespace

TEST_CASE("enumerate_noise_law small cases") {
  auto [t, o] = symmetric_pm1();
  auto law1 = cltlab::enumerate_noise_law(o, vec1(0.0), 1);
  REQUIRE(law1.atoms.size() == 2);
  CHECK(law1.scalar_atoms()[0] == doctest::Approx(-1.0));
  CHECK(law1.scalar_atoms()[1] == doctest::Approx(1.0));
  CHECK(law1.weights[0] == doctest::Approx(0.5));
  check_law_invariants(law1);

  auto law2 = cltlab::enumerate_noise_law(o, vec1(0.0), 2);
  REQUIRE(law2.atoms.size() == 3);
  CHECK(law2.scalar_atoms()[0] == doctest::Approx(-1.0));
  CHECK(law2.scalar_atoms()[1] == doctest::Approx(0.0));
  CHECK(law2.scalar_atoms()[2] == doctest::Approx(1.0));
  CHECK(law2.weights[1] == doctest::Approx(0.5));
  check_law_invariants(law2);

  auto [t1, o1] = targets::make_finite_sum_quadratic({vec1(5.0)}, 1.0);
  auto single = cltlab::enumerate_noise_law(o1, vec1(3.0), 4);
  REQUIRE(single.atoms.size() == 1);
  CHECK(single.scalar_atoms()[0] == 0.0);
  CHECK(single.weights[0] == doctest::Approx(1.0));
}

TEST_CASE("convolution path agrees with enumeration") {
  auto [t, o] = targets::make_finite_sum_quadratic(
      {vec1(-1.0), vec1(0.5), vec1(2.0)}, 1.0);
  // B = 21 forces the 1-D convolution path (3^21 > 1e6); cross-check the
  // law variance against Var(single)/B
  auto law = cltlab::enumerate_noise_law(o, vec1(0.0), 21);
  check_law_invariants(law);
  auto base = cltlab::enumerate_noise_law(o, vec1(0.0), 1);
  CHECK(law.variance_1d() ==
        doctest::Approx(base.variance_1d() / 21.0).epsilon(1e-10));

  // atoms {-1.5, 0, 1.5} live on a lattice: 3-fold sums give 7 values
  auto law3 = cltlab::enumerate_noise_law(o, vec1(0.0), 3);
  CHECK(law3.atoms.size() == 7);
  check_law_invariants(law3);
}

TEST_CASE("per-step noise KL basic values") {
  auto [t1, o1] = targets::make_finite_sum_quadratic({vec1(5.0)}, 1.0);
  auto single = cltlab::enumerate_noise_law(o1, vec1(0.0), 1);
  CHECK(cltlab::per_step_noise_kl(single, 0.3, false, 0.0) == 0.0);

  auto [t, o] = symmetric_pm1();
  auto law = cltlab::enumerate_noise_law(o, vec1(0.0), 1);
  CHECK(cltlab::per_step_noise_kl(law, 0.0, false, 0.0) == 0.0);

  // eta sweep: KL -> 0 and KL/eta^2 approaches a finite limit
  double k1 = cltlab::per_step_noise_kl(law, 0.1, false, 0.0);
  double k2 = cltlab::per_step_noise_kl(law, 0.05, false, 0.0);
  double k3 = cltlab::per_step_noise_kl(law, 0.025, false, 0.0);
  CHECK(k1 > k2);
  CHECK(k2 > k3);
  double r1 = k1 / (0.1 * 0.1);
  double r2 = k2 / (0.05 * 0.05);
  double r3 = k3 / (0.025 * 0.025);
  CHECK(std::abs(r3 - r2) <= std::abs(r2 - r1));
  CHECK(r3 > 0.0);
  // the quadratic coefficient is Var(N)^2/16 at leading order
  CHECK(r3 == doctest::Approx(1.0 / 16.0).epsilon(0.05));

  CHECK_THROWS_AS(cltlab::per_step_noise_kl(law, 1.0, true, 2.5),
                  std::invalid_argument);
}

TEST_CASE("exact-variance correction dominates the uncorrected KL") {
  auto [ts, os] = symmetric_pm1();
  auto [ta, oa] = targets::make_finite_sum_quadratic(
      {vec1(-1.0), vec1(0.25), vec1(0.75)}, 1.0);
  for (const auto* oracle : {&os, &oa}) {
    for (int b : {1, 2, 4}) {
      auto law = cltlab::enumerate_noise_law(*oracle, vec1(0.0), b);
      for (double eta : {0.02, 0.05, 0.1, 0.2}) {
        if (eta * law.variance_1d() >= 1.0) continue;
        double unc = cltlab::per_step_noise_kl(law, eta, false, 0.0);
        double cor = cltlab::per_step_noise_kl(law, eta, true, law.variance_1d());
        CHECK(cor <= unc);
      }
    }
  }
}

TEST_CASE("estimated-covariance correction follows the inverse-cube law") {
  // With the correction driven by the noisy estimator (fresh batch of B
  // pairs), the expected per-step KL decays like 1/B^3: the residual variance
  // mismatch is Var(sigma_hat) = 1/(B^2 B_est). On the +-1 target the
  // estimator's law is binomial, so the expectation is exact.
  auto [t, o] = symmetric_pm1();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(1);
  const double eta = 0.05;
  std::vector<std::pair<double, double>> pts;
  for (int b : {1, 2, 4, 8, 16}) {
    auto law = cltlab::enumerate_noise_law(o, x, b);
    // sigma_hat = 2 S / (B B_est) with S ~ Binomial(B_est, 1/2), B_est = B
    double expected_kl = 0.0;
    double log_half = std::log(0.5);
    for (int s = 0; s <= b; ++s) {
      double log_weight = std::lgamma(b + 1.0) - std::lgamma(s + 1.0) -
                          std::lgamma(b - s + 1.0) + b * log_half;
      double sigma_hat = 2.0 * s / (static_cast<double>(b) * b);
      expected_kl += std::exp(log_weight) *
                     cltlab::per_step_noise_kl(law, eta, true, sigma_hat);
    }
    pts.emplace_back(b, expected_kl);
  }
  double slope = cltlab::fit_batch_scaling(pts);
  CHECK(slope <= -2.6);
  CHECK(slope >= -3.4);
}

TEST_CASE("fit_batch_scaling recovers synthetic exponents") {
  std::vector<std::pair<double, double>> quad, cubic;
  for (double b : {1.0, 2.0, 4.0, 8.0, 16.0}) {
    quad.emplace_back(b, 3.7 / (b * b));
    cubic.emplace_back(b, 0.2 / (b * b * b));
  }
  CHECK(cltlab::fit_batch_scaling(quad) == doctest::Approx(-2.0).epsilon(1e-9));
  CHECK(cltlab::fit_batch_scaling(cubic) == doctest::Approx(-3.0).epsilon(1e-9));

  CHECK_THROWS_AS(cltlab::fit_batch_scaling({{1.0, 1.0}, {2.0, 0.5}, {4.0, 0.2}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(cltlab::fit_batch_scaling(
                      {{1.0, 1.0}, {2.0, 0.5}, {3.0, 0.2}, {4.0, 0.1}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(cltlab::fit_batch_scaling(
                      {{1.0, 1.0}, {2.0, 0.0}, {4.0, 0.2}, {8.0, 0.1}}),
                  std::domain_error);
}

TEST_CASE("wasserstein clt experiment") {
  // beta -> 0 limit: the convolution is an exact standard normal
  cltlab::CltExperimentConfig tiny;
  tiny.beta = 1e-6;
  tiny.batch = 4;
  tiny.quantile_points = 20000;
  auto res0 = cltlab::wass_clt_experiment(tiny);
  CHECK(res0.measured_w2sq <= 1e-10);

  cltlab::CltExperimentConfig cfg;
  cfg.beta = std::sqrt(0.1);
  cfg.batch = 4;
  auto res = cltlab::wass_clt_experiment(cfg);
  CHECK(res.measured_w2sq <= res.bound);

  // hypothesis violation is a configuration error
  cltlab::CltExperimentConfig bad;
  bad.beta = 0.9;  // beta^2 > 1/5
  bad.batch = 4;
  CHECK_THROWS_AS(cltlab::wass_clt_experiment(bad), std::invalid_argument);
}

TEST_CASE("zhai clt experiment exact two-point case and scaling") {
  cltlab::CltExperimentConfig cfg;
  cfg.beta = 0.25;
  cfg.batch = 1;
  auto res = cltlab::zhai_clt_experiment(cfg);
  // two-point vs N(0, beta^2): W2^2 = beta^2 (2 - 2 sqrt(2/pi))
  double exact = cfg.beta * cfg.beta * (2.0 - 2.0 * std::sqrt(2.0 / M_PI));
  CHECK(res.measured_w2sq == doctest::Approx(exact).epsilon(1e-4));
  CHECK(res.measured_w2sq <= res.bound);

  // measured W2^2 scales as beta^2 at fixed shape
  cltlab::CltExperimentConfig half = cfg;
  half.beta = 0.125;
  auto res_half = cltlab::zhai_clt_experiment(half);
  CHECK(res.measured_w2sq / res_half.measured_w2sq ==
        doctest::Approx(4.0).epsilon(1e-6));

  // bound / measured ratio is finite on a grid (diagnostic)
  for (int b : {2, 8}) {
    cltlab::CltExperimentConfig g = cfg;
    g.batch = b;
    auto r = cltlab::zhai_clt_experiment(g);
    CHECK(r.bound / r.measured_w2sq >= 1.0);
  }
}

TEST_CASE("conditional noise energy") {
  auto [t, o] = symmetric_pm1();
  VectorXd x = vec1(0.0);

  auto zero = cltlab::conditional_noise_energy(o, x, 2, 0.0);
  CHECK(zero.measured == 0.0);
  CHECK(zero.bound == 0.0);

  for (int b : {1, 2, 4}) {
    auto lo = cltlab::conditional_noise_energy(o, x, b, 0.01);
    auto hi = cltlab::conditional_noise_energy(o, x, b, 0.02);
    CHECK(lo.measured <= lo.bound);
    CHECK(hi.measured <= hi.bound);
    double ratio = hi.measured / lo.measured;
    CHECK(ratio >= 1.5);
    CHECK(ratio <= 2.5);
  }
}

TEST_CASE("covariance estimator checks") {
  auto [t1, o1] = targets::make_finite_sum_quadratic({vec1(5.0)}, 1.0);
  auto eng0 = rng::SplitMix64(1);
  auto trivial = cltlab::cov_estimator_check(o1, vec1(0.0), 2, 2, 1000, eng0);
  CHECK(trivial.all_ok());
  CHECK(trivial.frobenius_error == 0.0);

  auto [t, o] = symmetric_pm1();
  auto eng = rng::SplitMix64(2);
  auto rep = cltlab::cov_estimator_check(o, vec1(0.0), 2, 4, 100000, eng);
  CHECK(rep.all_ok());
}
