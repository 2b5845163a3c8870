#include <doctest.h>

#include <cmath>

#include "sgmcmc/rng.hpp"
#include "sgmcmc/targets.hpp"

using namespace sgmcmc;
using Eigen::VectorXd;

namespace {

VectorXd vec1(double x) {
  VectorXd v(1);
  v[0] = x;
  return v;
}

// centered finite differences of the potential, step 1e-4 (1 + ||x||)
VectorXd fd_gradient(const targets::TargetSpec& t, const VectorXd& x) {
  double h = 1e-4 * (1.0 + x.norm());
  VectorXd g(t.dim);
  for (int i = 0; i < t.dim; ++i) {
    VectorXd hi = x, lo = x;
    hi[i] += h;
    lo[i] -= h;
    g[i] = (t.potential(hi) - t.potential(lo)) / (2.0 * h);
  }
  return g;
}

void check_gradient_consistency(const targets::TargetSpec& t, std::uint64_t seed) {
  auto eng = rng::SplitMix64(seed);
  for (int trial = 0; trial < 100; ++trial) {
    VectorXd x = 3.0 * rng::standard_normal(t.dim, eng);
    VectorXd exact = t.gradient(x);
    VectorXd approx = fd_gradient(t, x);
    double rel = (exact - approx).norm() / (1.0 + exact.norm());
    CHECK(rel <= 1e-5);
  }
}

}  // namespace

TEST_CASE("gaussian target gradients and metadata") {
  auto t = targets::make_gaussian_target(1, 1.0);
  CHECK(t.gradient(vec1(2.0))[0] == doctest::Approx(2.0).epsilon(1e-15));

  auto t3 = targets::make_gaussian_target(3, 1.0);
  CHECK(t3.gradient(VectorXd::Zero(3)).norm() == 0.0);

  auto t4 = targets::make_gaussian_target(1, 4.0);
  CHECK(*t4.lsi_constant == doctest::Approx(0.25));
  CHECK(*t4.m2 == doctest::Approx(2.0));

  CHECK_THROWS_AS(targets::make_gaussian_target(0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(targets::make_gaussian_target(1, -1.0), std::invalid_argument);

  check_gradient_consistency(t4, 11);
}

TEST_CASE("finite-sum quadratic oracle algebra") {
  auto [t, o] = targets::make_finite_sum_quadratic({vec1(-1.0), vec1(1.0)}, 1.0);
  CHECK(t.gradient(vec1(0.5))[0] == doctest::Approx(0.5).epsilon(1e-15));

  // component noise is independent of x: grad f_i(x) - grad F(x) = A(abar - a_i)
  for (double x : {0.0, 7.0}) {
    VectorXd noise0 = o.component(0, vec1(x)) - t.gradient(vec1(x));
    CHECK(noise0[0] == doctest::Approx(1.0).epsilon(1e-14));
    VectorXd noise1 = o.component(1, vec1(x)) - t.gradient(vec1(x));
    CHECK(noise1[0] == doctest::Approx(-1.0).epsilon(1e-14));
  }
  CHECK(o.growth_m == 0.0);
  CHECK(o.growth_g == doctest::Approx(1.0));

  auto [t1, o1] = targets::make_finite_sum_quadratic({vec1(5.0)}, 1.0);
  CHECK(o1.growth_g == 0.0);

  CHECK_THROWS_AS(targets::make_finite_sum_quadratic({}, 1.0), std::invalid_argument);
  check_gradient_consistency(t, 12);
}

TEST_CASE("oracle draws are unbiased") {
  auto [t, o] = targets::make_finite_sum_quadratic(
      {vec1(-1.0), vec1(0.25), vec1(2.0)}, 1.5);
  auto eng = rng::SplitMix64(77);
  VectorXd x = vec1(0.7);
  VectorXd grad = t.gradient(x);
  const long draws = 100000;
  for (int b : {1, 4}) {
    VectorXd mean = VectorXd::Zero(1);
    for (long i = 0; i < draws; ++i) {
      for (const auto& g : o.draw(x, b, eng)) mean += g;
    }
    mean /= static_cast<double>(draws * b);
    double tol = 5.0 * (o.growth_m * x.norm() + o.growth_g) /
                 std::sqrt(static_cast<double>(draws) * b);
    CHECK((mean - grad).norm() <= tol);
  }
}

TEST_CASE("finite-sum noise histogram matches the uniform law") {
  // exact single-draw law is uniform over components; TV <= 0.02 at 1e5 draws
  std::vector<VectorXd> centers;
  const int n = 16;
  for (int i = 0; i < n; ++i) centers.push_back(vec1(static_cast<double>(i)));
  auto [t, o] = targets::make_finite_sum_quadratic(centers, 1.0);
  VectorXd x = vec1(0.0);
  VectorXd grad = t.gradient(x);

  auto eng = rng::SplitMix64(1234);
  std::vector<long> counts(n, 0);
  const long draws = 100000;
  for (long it = 0; it < draws; ++it) {
    VectorXd g = o.draw(x, 1, eng)[0];
    // identify the component by matching the noise atom
    for (int i = 0; i < n; ++i) {
      if ((g - o.component(i, x)).norm() < 1e-12) {
        ++counts[i];
        break;
      }
    }
  }
  double tv = 0.0;
  for (int i = 0; i < n; ++i)
    tv += std::abs(counts[i] / static_cast<double>(draws) - 1.0 / n);
  CHECK(0.5 * tv <= 0.02);
}

TEST_CASE("mixture target reduces to gaussian and matches finite differences") {
  targets::MixtureMode single{1.0, VectorXd::Zero(1), 1.0};
  auto t = targets::make_mixture_target({single});
  CHECK(t.gradient(vec1(0.7))[0] == doctest::Approx(0.7).epsilon(1e-12));

  targets::MixtureMode a{0.5, vec1(-2.0), 1.0}, b{0.5, vec1(2.0), 1.0};
  auto tm = targets::make_mixture_target({a, b});
  CHECK(std::abs(tm.gradient(vec1(0.0))[0]) <= 1e-14);

  VectorXd g = tm.gradient(vec1(2.0));
  VectorXd fd = fd_gradient(tm, vec1(2.0));
  CHECK(std::abs(g[0] - fd[0]) <= 1e-6);

  CHECK(!tm.lsi_constant.has_value());
  CHECK_THROWS_AS(targets::make_mixture_target({{-0.5, vec1(0.0), 1.0},
                                                {1.5, vec1(1.0), 1.0}}),
                  std::invalid_argument);
  check_gradient_consistency(tm, 13);
}

TEST_CASE("check_growth validates the linear growth bound") {
  auto [t, o] = targets::make_finite_sum_quadratic({vec1(-1.0), vec1(1.0)}, 1.0);
  std::vector<VectorXd> points = {vec1(0.0), vec1(3.0), vec1(-7.0)};

  auto eng = rng::SplitMix64(5);
  CHECK(targets::check_growth(o, points, 2000, eng));

  targets::StochasticOracle halved = o;
  halved.growth_g = o.growth_g / 2.0;
  auto eng2 = rng::SplitMix64(5);
  CHECK_FALSE(targets::check_growth(halved, points, 2000, eng2));

  auto [tz, oz] = targets::make_finite_sum_quadratic({vec1(4.0)}, 1.0);
  auto eng3 = rng::SplitMix64(5);
  CHECK(targets::check_growth(oz, points, 100, eng3));
}

TEST_CASE("moment profile validation") {
  targets::MomentProfile p({1.0, 1.0, 2.0, 4.0, 4.0});
  CHECK(p.order() == 4);
  CHECK(p.at(2) == 2.0);
  CHECK_THROWS_AS(targets::MomentProfile({1.0, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(targets::MomentProfile({-1.0}), std::invalid_argument);
}
