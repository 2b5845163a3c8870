#include <doctest.h>

#include <cmath>

#include "sgmcmc/metrics.hpp"
#include "sgmcmc/rng.hpp"

using namespace sgmcmc;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

metrics::GaussianLaw law1(double mean, double var) {
  return metrics::GaussianLaw(VectorXd::Constant(1, mean),
                              MatrixXd::Constant(1, 1, var));
}

double normal_density(double x, double mean, double var) {
  double z = (x - mean);
  return std::exp(-0.5 * z * z / var) / std::sqrt(2.0 * M_PI * var);
}

}  // namespace

TEST_CASE("gaussian law validation") {
  Eigen::MatrixXd asym(2, 2);
  asym << 1.0, 0.2, 0.1, 1.0;
  CHECK_THROWS_AS(metrics::GaussianLaw(VectorXd::Zero(2), asym),
                  std::invalid_argument);
  Eigen::MatrixXd indef(2, 2);
  indef << 1.0, 2.0, 2.0, 1.0;  // eigenvalues 3 and -1
  CHECK_THROWS_AS(metrics::GaussianLaw(VectorXd::Zero(2), indef),
                  std::invalid_argument);
  CHECK_THROWS_AS(metrics::GaussianLaw(VectorXd::Zero(1), asym),
                  std::invalid_argument);
}

TEST_CASE("gaussian_kl closed form") {
  CHECK(metrics::gaussian_kl(law1(0.3, 1.7), law1(0.3, 1.7)) ==
        doctest::Approx(0.0).epsilon(1e-14));
  CHECK(metrics::gaussian_kl(law1(1.0, 1.0), law1(0.0, 1.0)) ==
        doctest::Approx(0.5).epsilon(1e-14));
  // (log(1/2) - 1 + 2)/2
  CHECK(metrics::gaussian_kl(law1(0.0, 2.0), law1(0.0, 1.0)) ==
        doctest::Approx(0.5 * (std::log(0.5) + 1.0)).epsilon(1e-12));
  CHECK_THROWS_AS(metrics::gaussian_kl(law1(0.0, 1.0), law1(0.0, 0.0)),
                  std::domain_error);
}

TEST_CASE("gaussian_kl positivity on commuting-covariance grids") {
  for (double vp : {0.5, 1.0, 2.0}) {
    for (double vq : {0.5, 1.0, 2.0}) {
      for (double shift : {0.0, 0.7}) {
        VectorXd mp = VectorXd::Zero(2), mq = VectorXd::Constant(2, shift);
        MatrixXd cp = vp * MatrixXd::Identity(2, 2);
        MatrixXd cq = vq * MatrixXd::Identity(2, 2);
        double kl = metrics::gaussian_kl({mp, cp}, {mq, cq});
        CHECK(kl >= 0.0);
        bool equal = (vp == vq) && shift == 0.0;
        if (equal) {
          CHECK(kl <= 1e-13);
        } else {
          CHECK(kl > 1e-8);
        }
      }
    }
  }
}

TEST_CASE("gaussian_chi_square identity values") {
  VectorXd a = VectorXd::Zero(3), b = VectorXd::Zero(3);
  CHECK(metrics::gaussian_chi_square(a, b, 2.0) == 0.0);
  b[0] = std::sqrt(2.0);  // ||mu1 - mu2||^2 = sigma^2
  CHECK(metrics::gaussian_chi_square(a, b, 2.0) ==
        doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-14));
  CHECK_THROWS_AS(metrics::gaussian_chi_square(a, b, 0.0), std::invalid_argument);
}

TEST_CASE("chi-square dominates KL via log(1 + chi2)") {
  auto eng = rng::SplitMix64(77);
  for (int trial = 0; trial < 200; ++trial) {
    int d = 1 + static_cast<int>(rng::uniform_index(3, eng));
    double s2 = rng::uniform_real(0.3, 3.0, eng);
    VectorXd mu1 = rng::standard_normal(d, eng);
    VectorXd mu2 = rng::standard_normal(d, eng);
    double kl = metrics::gaussian_kl({mu1, s2 * MatrixXd::Identity(d, d)},
                                     {mu2, s2 * MatrixXd::Identity(d, d)});
    double chi = metrics::gaussian_chi_square(mu1, mu2, s2);
    CHECK(kl <= std::log1p(chi) + 1e-12);
  }
}

TEST_CASE("gaussian_w2 closed forms") {
  CHECK(metrics::gaussian_w2(law1(0.4, 1.3), law1(0.4, 1.3)) ==
        doctest::Approx(0.0).epsilon(1e-10));
  CHECK(metrics::gaussian_w2(law1(0.0, 1.0), law1(0.0, 4.0)) ==
        doctest::Approx(1.0).epsilon(1e-12));

  VectorXd zero2 = VectorXd::Zero(2);
  MatrixXd cp = MatrixXd::Zero(2, 2), cq = MatrixXd::Zero(2, 2);
  cp.diagonal() << 1.0, 4.0;
  cq.diagonal() << 4.0, 1.0;
  CHECK(metrics::gaussian_w2({zero2, cp}, {zero2, cq}) ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("covariance mismatch identity and proof inequality") {
  CHECK(metrics::covariance_mismatch_w2sq(MatrixXd::Zero(2, 2)) == 0.0);
  MatrixXd s(1, 1);
  s << 3.0;
  CHECK(metrics::covariance_mismatch_w2sq(s) == doctest::Approx(1.0).epsilon(1e-14));

  // lambda I in d dimensions: d (2 + lambda - 2 sqrt(1 + lambda))
  double lam = 0.37;
  MatrixXd iso = lam * MatrixXd::Identity(4, 4);
  CHECK(metrics::covariance_mismatch_w2sq(iso) ==
        doctest::Approx(4.0 * (2.0 + lam - 2.0 * std::sqrt(1.0 + lam))).epsilon(1e-13));

  auto eng = rng::SplitMix64(31);
  for (int trial = 0; trial < 1000; ++trial) {
    int d = 1 + static_cast<int>(rng::uniform_index(5, eng));
    MatrixXd a(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) a(i, j) = rng::uniform_real(-1.0, 1.0, eng);
    MatrixXd sig = a * a.transpose();
    sig *= rng::uniform_real(0.01, 1.0, eng) / sig.trace();
    double v = metrics::covariance_mismatch_w2sq(sig);
    CHECK(v <= 0.25 * sig.trace() * sig.trace() * (1.0 + 1e-12));
  }

  MatrixXd neg(1, 1);
  neg << -1.0;
  CHECK_THROWS_AS(metrics::covariance_mismatch_w2sq(neg), std::domain_error);
}

TEST_CASE("w2_1d_exact order statistics") {
  CHECK(metrics::w2_1d_exact({3.0, 1.0, 2.0}, {2.0, 3.0, 1.0}) == 0.0);
  CHECK(metrics::w2_1d_exact({0.0}, {1.0}) == doctest::Approx(1.0));
  CHECK(metrics::w2_1d_exact({0.0, 2.0}, {1.0, 3.0}) == doctest::Approx(1.0));
  CHECK_THROWS_AS(metrics::w2_1d_exact({0.0}, {0.0, 1.0}), std::invalid_argument);
}

TEST_CASE("kl quadrature against the gaussian closed form") {
  auto p_eq = [](double x) { return normal_density(x, 0.0, 1.0); };
  CHECK(std::abs(metrics::kl_quadrature_1d(p_eq, p_eq, {-10.0, 10.0, 2001})) <= 1e-12);

  auto p = [](double x) { return normal_density(x, 1.0, 1.0); };
  auto q = [](double x) { return normal_density(x, 0.0, 1.0); };
  CHECK(metrics::kl_quadrature_1d(p, q, {-10.0, 11.0, 20001}) ==
        doctest::Approx(0.5).epsilon(1e-8));

  // mixture against its moment-matched gaussian is nonnegative
  auto mix = [](double x) {
    return 0.5 * normal_density(x, -1.5, 1.0) + 0.5 * normal_density(x, 1.5, 1.0);
  };
  auto match = [](double x) { return normal_density(x, 0.0, 1.0 + 2.25); };
  CHECK(metrics::kl_quadrature_1d(mix, match, {-14.0, 14.0, 20001}) >= 0.0);

  auto zero = [](double) { return 0.0; };
  CHECK_THROWS_AS(metrics::kl_quadrature_1d(zero, q, {-1.0, 1.0, 11}),
                  std::domain_error);
}

TEST_CASE("knn kl estimator on gaussian pairs") {
  auto eng = rng::SplitMix64(2024);
  std::vector<VectorXd> same_a, same_b;
  for (int i = 0; i < 10000; ++i) {
    same_a.push_back(rng::standard_normal(1, eng));
    same_b.push_back(rng::standard_normal(1, eng));
  }
  CHECK(std::abs(metrics::knn_kl_estimate(same_a, same_b, 5)) <= 0.05);

  std::vector<VectorXd> shifted, base;
  for (int i = 0; i < 100000; ++i) {
    VectorXd s = rng::standard_normal(1, eng);
    s[0] += 1.0;
    shifted.push_back(s);
    base.push_back(rng::standard_normal(1, eng));
  }
  CHECK(metrics::knn_kl_estimate(shifted, base, 5) == doctest::Approx(0.5).epsilon(0.1));

  // degenerate duplicated input: distances floored, value finite and reported
  double degenerate = metrics::knn_kl_estimate(same_a, same_a, 5);
  CHECK(std::isfinite(degenerate));

  CHECK_THROWS_AS(metrics::knn_kl_estimate({same_a[0]}, {same_b[0]}, 5),
                  std::invalid_argument);
}
