#include "sgmcmc/bounds.hpp"

#include <cmath>
#include <stdexcept>

namespace sgmcmc::bounds {

namespace {

double require(const std::optional<double>& v, const char* what) {
  if (!v) throw std::invalid_argument(std::string("bound evaluator: missing ") + what);
  return *v;
}

void finish(BoundReport& r) {
  double total = 0.0;
  for (const auto& t : r.terms) {
    if (t.value < 0.0)
      throw std::logic_error("bound term went negative: " + t.expression);
    total += t.value;
  }
  r.total = total;
}

void base_inputs(BoundReport& r, const BoundParams& p) {
  r.inputs = {{"eta", p.eta},          {"B", p.batch},
              {"K", p.horizon},        {"d", p.dim},
              {"M", p.growth_m},       {"G", p.growth_g},
              {"L", p.smoothness_l},   {"C2", p.c2},
              {"C4", p.c4},            {"C6", p.c6}};
}

void check_positive(const BoundParams& p) {
  if (!(p.eta > 0.0)) throw std::invalid_argument("bound evaluator: eta must be > 0");
  if (!(p.batch >= 1.0)) throw std::invalid_argument("bound evaluator: B must be >= 1");
  if (!(p.dim >= 1.0)) throw std::invalid_argument("bound evaluator: d must be >= 1");
}

double log_factor(double b) {
  double f = 1.0 + std::log(b);
  return f * f;
}

}  // namespace

BoundReport bound_sgld_lsi(const BoundParams& p) {
  check_positive(p);
  const double lsi = require(p.lsi_constant, "lsi_constant");
  const double kl0 = require(p.initial_kl, "initial_kl");
  const double eta = p.eta, b = p.batch, k = p.horizon, d = p.dim;
  const double m = p.growth_m, g = p.growth_g, l = p.smoothness_l;

  BoundReport r;
  r.name = "sgld_lsi_kl";
  base_inputs(r, p);
  r.inputs.emplace_back("lsi", lsi);
  r.inputs.emplace_back("KL0", kl0);
  if (l > 0.0 && eta > lsi / (6.0 * l * l))
    r.warnings.push_back("hypothesis eta <= lsi/(6 L^2) violated");

  r.terms = {
      {"exp(-lsi*eta*K/2) * KL0", std::exp(-lsi * eta * k / 2.0) * kl0},
      {"11*L^2*eta*d/lsi", 11.0 * l * l * eta * d / lsi},
      {"7*L*eta*(M^2*C2*d + G^2)/(B*lsi)",
       7.0 * l * eta * (m * m * p.c2 * d + g * g) / (b * lsi)},
      {"1210*eta*(M^4*C4*d^2 + G^4)/(lsi*B^2)",
       1210.0 * eta * (std::pow(m, 4) * p.c4 * d * d + std::pow(g, 4)) /
           (lsi * b * b)},
  };
  finish(r);
  return r;
}

AbsgldBoundReport bound_absgld_lsi(const BoundParams& p) {
  check_positive(p);
  const double lsi = require(p.lsi_constant, "lsi_constant");
  const double kl0 = require(p.initial_kl, "initial_kl");
  const double m1 = require(p.m1, "m1");
  const double m2 = require(p.m2, "m2");
  const double eta = p.eta, k = p.horizon, d = p.dim;
  const double m = p.growth_m, g = p.growth_g, l = p.smoothness_l;

  AbsgldBoundReport out;
  out.kl.name = "absgld_lsi_kl";
  base_inputs(out.kl, p);
  out.kl.inputs.emplace_back("lsi", lsi);
  out.kl.inputs.emplace_back("KL0", kl0);
  out.kl.inputs.emplace_back("m1", m1);
  out.kl.inputs.emplace_back("m2", m2);
  double denom = 8.0 * l * (l * m + 128.0 * m * m);
  if (denom > 0.0 && eta > lsi * lsi / denom)
    out.kl.warnings.push_back("hypothesis eta <= lsi^2/(8L(LM+128M^2)) violated");

  out.kl.terms = {
      {"exp(-lsi*eta*K/4) * KL0", std::exp(-lsi * eta * k / 4.0) * kl0},
      {"256*eta/lsi*(L^2*d + 2*M^2*m2^2 + G^2)",
       256.0 * eta / lsi * (l * l * d + 2.0 * m * m * m2 * m2 + g * g)},
      {"64*L^2*eta^2/lsi*(M*m1 + M + G)",
       64.0 * l * l * eta * eta / lsi * (m * m1 + m + g)},
  };
  finish(out.kl);

  out.amortized_batch.name = "absgld_amortized_batch";
  out.amortized_batch.inputs = out.kl.inputs;
  out.amortized_batch.warnings = out.kl.warnings;
  out.amortized_batch.terms = {
      {"2", 2.0},
      {"G", g},
      {"50*M/(lsi^1.5*eta*K)*sqrt(KL0)",
       k > 0.0 ? 50.0 * m / (std::pow(lsi, 1.5) * eta * k) * std::sqrt(kl0) : 0.0},
      {"28*M*sqrt(eta)/lsi*(L*sqrt(d) + M*m2 + G)",
       28.0 * m * std::sqrt(eta) / lsi * (l * std::sqrt(d) + m * m2 + g)},
      {"8*L*eta/lsi*sqrt(2*M*m1 + 2*M + 2*G)",
       8.0 * l * eta / lsi * std::sqrt(2.0 * m * m1 + 2.0 * m + 2.0 * g)},
  };
  finish(out.amortized_batch);
  return out;
}

FdPiBoundReport bound_sgld_fd_pi(const BoundParams& p) {
  check_positive(p);
  const double kl0 = require(p.initial_kl, "initial_kl");
  const double eta = p.eta, b = p.batch, k = p.horizon, d = p.dim;
  const double m = p.growth_m, g = p.growth_g, l = p.smoothness_l;
  if (!(k > 0.0))
    throw std::invalid_argument("bound_sgld_fd_pi: K must be > 0");

  const double noise2 = m * m * p.c2 * d + g * g;
  const double noise4 = std::pow(m, 4) * p.c4 * d * d + std::pow(g, 4);

  FdPiBoundReport out;
  out.fisher.name = "sgld_fd";
  base_inputs(out.fisher, p);
  out.fisher.inputs.emplace_back("KL0", kl0);
  if (l > 0.0 && eta > 1.0 / (6.0 * l))
    out.fisher.warnings.push_back("hypothesis eta <= 1/(6L) violated");
  out.fisher.terms = {
      {"4*KL0/(K*eta)", 4.0 * kl0 / (k * eta)},
      {"20*L^2*eta*d", 20.0 * l * l * eta * d},
      {"12*L*eta*(M^2*C2*d + G^2)/B", 12.0 * l * eta * noise2 / b},
      {"2304*eta*(M^4*C4*d^2 + G^4)/B^2", 2304.0 * eta * noise4 / (b * b)},
  };
  finish(out.fisher);

  if (p.pi_constant) {
    const double pi = *p.pi_constant;
    BoundReport tv;
    tv.name = "sgld_pi_tv_sq";
    base_inputs(tv, p);
    tv.inputs.emplace_back("pi", pi);
    tv.inputs.emplace_back("KL0", kl0);
    tv.warnings = out.fisher.warnings;
    tv.terms = {
        {"16*KL0/(pi*K*eta)", 16.0 * kl0 / (pi * k * eta)},
        {"80*L^2*eta*d/pi", 80.0 * l * l * eta * d / pi},
        {"48*L*eta*(M^2*C2*d + G^2)/(pi*B)", 48.0 * l * eta * noise2 / (pi * b)},
        {"9216*eta*(M^4*C4*d^2 + G^4)/(pi*B^2)",
         9216.0 * eta * noise4 / (pi * b * b)},
    };
    finish(tv);
    out.tv_sq = std::move(tv);
  }
  return out;
}

BoundReport bound_sgld_traj_kl(const BoundParams& p) {
  check_positive(p);
  const double eta = p.eta, b = p.batch, k = p.horizon, d = p.dim;
  const double m = p.growth_m, g = p.growth_g;

  BoundReport r;
  r.name = "sgld_traj_kl";
  base_inputs(r, p);
  r.terms = {
      {"2*eta^2*K/B^2*(M^4*C4*d^2 + G^4)",
       2.0 * eta * eta * k / (b * b) *
           (std::pow(m, 4) * p.c4 * d * d + std::pow(g, 4))},
      {"3000*eta^3*K/B^4*(M^6*C6*d^6 + G^6*d^3)*(1+log B)^2",
       3000.0 * std::pow(eta, 3) * k / std::pow(b, 4) *
           (std::pow(m, 6) * p.c6 * std::pow(d, 6) +
            std::pow(g, 6) * std::pow(d, 3)) *
           log_factor(b)},
  };
  finish(r);
  return r;
}

BoundReport bound_ccsgld_traj_kl(const BoundParams& p) {
  check_positive(p);
  const double eta = p.eta, b = p.batch, k = p.horizon, d = p.dim;
  const double m = p.growth_m, g = p.growth_g;
  const double u4 = std::pow(m, 4) * p.c4 * d * d + std::pow(g, 4);
  const double u6 = std::pow(m, 6) * p.c6 * std::pow(d, 3) + std::pow(g, 6);
  const double u6d = std::pow(m, 6) * p.c6 * std::pow(d, 6) +
                     std::pow(g, 6) * std::pow(d, 3);

  BoundReport r;
  r.name = "ccsgld_traj_kl";
  base_inputs(r, p);
  r.terms = {
      {"8*eta^2*K/B^3*(M^4*C4*d^2 + G^4)",
       8.0 * eta * eta * k / std::pow(b, 3) * u4},
      {"96*eta^3*K/B^3*(M^6*C6*d^3 + G^6)",
       96.0 * std::pow(eta, 3) * k / std::pow(b, 3) * u6},
      {"3200*eta^5*K/B^3*(M^6*C6*d^6 + G^6*d^3)",
       3200.0 * std::pow(eta, 5) * k / std::pow(b, 3) * u6d},
      {"1875*eta^3*K*(1+log B)^2/B^4*(M^6*C6*d^6 + G^6*d^3)",
       1875.0 * std::pow(eta, 3) * k * log_factor(b) / std::pow(b, 4) * u6d},
  };
  finish(r);
  return r;
}

namespace {

void rbm_hypothesis(BoundReport& r, const BoundParams& p) {
  double m = p.growth_m;
  if (m > 0.0) {
    double ceiling = p.batch * p.sigma * p.sigma / (40.0 * m * m * p.dim);
    if (p.eta > ceiling)
      r.warnings.push_back("hypothesis eta <= B sigma^2/(40 M^2 d) violated");
  }
}

}  // namespace

BoundReport bound_rbm_traj_kl(const BoundParams& p) {
  check_positive(p);
  const double eta = p.eta, b = p.batch, k = p.horizon, d = p.dim;
  const double m = p.growth_m, s = p.sigma, n = p.particles;

  BoundReport r;
  r.name = "rbm_traj_kl";
  r.order_level = true;
  base_inputs(r, p);
  r.inputs.emplace_back("sigma", s);
  r.inputs.emplace_back("n", n);
  rbm_hypothesis(r, p);
  r.terms = {
      {"eta^2*M^4*n*K/(B^2*sigma^4)",
       eta * eta * std::pow(m, 4) * n * k / (b * b * std::pow(s, 4))},
      {"d*eta^3*M^6*n*K*(1+log B)^2/(B^4*sigma^6)",
       d * std::pow(eta, 3) * std::pow(m, 6) * n * k * log_factor(b) /
           (std::pow(b, 4) * std::pow(s, 6))},
  };
  finish(r);
  return r;
}

BoundReport bound_ccrbm_traj_kl(const BoundParams& p) {
  check_positive(p);
  if (!(p.estimator_batch >= 1.0))
    throw std::invalid_argument("bound_ccrbm_traj_kl: B' must be >= 1");
  const double eta = p.eta, b = p.batch, bp = p.estimator_batch;
  const double k = p.horizon, d = p.dim;
  const double m = p.growth_m, s = p.sigma, n = p.particles;

  BoundReport r;
  r.name = "ccrbm_traj_kl";
  r.order_level = true;
  base_inputs(r, p);
  r.inputs.emplace_back("sigma", s);
  r.inputs.emplace_back("n", n);
  r.inputs.emplace_back("Bprime", bp);
  rbm_hypothesis(r, p);
  r.terms = {
      {"eta^2*M^4*n*K/(B^2*Bprime*sigma^4)",
       eta * eta * std::pow(m, 4) * n * k / (b * b * bp * std::pow(s, 4))},
      {"eta^3*M^6*n*K/(B^3*sigma^6)",
       std::pow(eta, 3) * std::pow(m, 6) * n * k / (std::pow(b, 3) * std::pow(s, 6))},
      {"d*eta^3*M^6*n*K*(1+log B)^2/(B^4*sigma^6)",
       d * std::pow(eta, 3) * std::pow(m, 6) * n * k * log_factor(b) /
           (std::pow(b, 4) * std::pow(s, 6))},
  };
  finish(r);
  return r;
}

}  // namespace sgmcmc::bounds
