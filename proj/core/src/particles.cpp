#include "sgmcmc/particles.hpp"

#include <cmath>
#include <stdexcept>

namespace sgmcmc::particles {

std::string variant_name(Variant v) {
  switch (v) {
    case Variant::kIPD: return "IPD";
    case Variant::kRBM: return "RBM";
    case Variant::kCCRBM: return "CCRBM";
  }
  return "?";
}

Variant variant_from_name(const std::string& name) {
  if (name == "IPD") return Variant::kIPD;
  if (name == "RBM") return Variant::kRBM;
  if (name == "CCRBM") return Variant::kCCRBM;
  throw std::invalid_argument("unknown particle variant: " + name);
}

namespace {

void validate(const ParticleSystem& s) {
  if (s.n < 1 || s.d < 1) throw std::invalid_argument("particle system needs n, d >= 1");
  if (static_cast<int>(s.states.size()) != s.n)
    throw std::invalid_argument("particle state count does not match n");
  if (!(s.step > 0.0)) throw std::invalid_argument("particle step must be > 0");
  if (!(s.diffusion > 0.0)) throw std::invalid_argument("diffusion must be > 0");
  if (s.batch < 1 || s.estimator_batch < 1)
    throw std::invalid_argument("batch sizes must be >= 1");
  for (const auto& x : s.states)
    if (!x.allFinite()) throw std::invalid_argument("non-finite particle state");
}

Eigen::VectorXd eval_kernel(const ParticleSystem& s, long k, int i, int j,
                            const Eigen::VectorXd& xi, const Eigen::VectorXd& xj,
                            RunCounters* counters) {
  if (counters) ++counters->kernel_evals;
  if (!s.interact) return Eigen::VectorXd::Zero(s.d);
  Eigen::VectorXd v = s.interact(k, i, j, xi, xj);
  if (v.norm() > s.kernel_bound * (1.0 + 1e-12))
    throw std::domain_error("interaction kernel exceeded its bound M");
  return v;
}

Eigen::VectorXd confine_at(const ParticleSystem& s, long k, int i,
                           const Eigen::VectorXd& x) {
  if (!s.confine) return Eigen::VectorXd::Zero(s.d);
  return s.confine(k, i, x);
}

// One accumulation order for all variants; the reductions rely on it.
Eigen::VectorXd advance(const ParticleSystem& s, const Eigen::VectorXd& x,
                        const Eigen::VectorXd& g, const Eigen::VectorXd& interaction,
                        const Eigen::VectorXd& eps_eff) {
  return x + s.step * g + s.step * interaction +
         std::sqrt(s.step) * s.diffusion * eps_eff;
}

Eigen::VectorXd full_interaction(const ParticleSystem& s, long k, int i,
                                 RunCounters* counters) {
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(s.d);
  for (int j = 0; j < s.n; ++j)
    sum += eval_kernel(s, k, i, j, s.states[i], s.states[j], counters);
  return sum / static_cast<double>(s.n);
}

Eigen::VectorXd batched_interaction(const ParticleSystem& s, long k, int i,
                                    const std::vector<long>& idx,
                                    RunCounters* counters) {
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(s.d);
  for (long j : idx) {
    if (j < 0 || j >= s.n) throw std::invalid_argument("batch index out of range");
    sum += eval_kernel(s, k, i, static_cast<int>(j), s.states[i], s.states[j],
                       counters);
  }
  return sum / static_cast<double>(idx.size());
}

}  // namespace

std::vector<Eigen::VectorXd> ipd_step(const ParticleSystem& system, long step_index,
                                      const std::vector<Eigen::VectorXd>& noises,
                                      RunCounters* counters) {
  validate(system);
  std::vector<Eigen::VectorXd> next(system.n);
  for (int i = 0; i < system.n; ++i) {
    next[i] = advance(system, system.states[i],
                      confine_at(system, step_index, i, system.states[i]),
                      full_interaction(system, step_index, i, counters), noises[i]);
  }
  return next;
}

std::vector<Eigen::VectorXd> rbm_step(const ParticleSystem& system, long step_index,
                                      const std::vector<std::vector<long>>& indices,
                                      const std::vector<Eigen::VectorXd>& noises,
                                      RunCounters* counters,
                                      std::vector<Eigen::VectorXd>* diagnostics) {
  validate(system);
  if (static_cast<int>(indices.size()) != system.n)
    throw std::invalid_argument("rbm_step: need one index row per particle");
  std::vector<Eigen::VectorXd> next(system.n);
  if (diagnostics) diagnostics->assign(system.n, Eigen::VectorXd::Zero(system.d));
  for (int i = 0; i < system.n; ++i) {
    Eigen::VectorXd khat = batched_interaction(system, step_index, i, indices[i], counters);
    if (diagnostics)
      (*diagnostics)[i] = khat - full_interaction(system, step_index, i, counters);
    next[i] = advance(system, system.states[i],
                      confine_at(system, step_index, i, system.states[i]), khat,
                      noises[i]);
  }
  return next;
}

CovEstimate ccrbm_covariance_estimate(const ParticleSystem& system, long step_index,
                                      int i, const std::vector<long>& j_indices,
                                      const std::vector<long>& jbar_indices,
                                      RunCounters* counters) {
  validate(system);
  if (j_indices.size() != jbar_indices.size() || j_indices.empty())
    throw std::invalid_argument("ccrbm_covariance_estimate: J and Jbar sizes differ");
  std::vector<Eigen::VectorXd> diffs;
  diffs.reserve(j_indices.size());
  for (std::size_t l = 0; l < j_indices.size(); ++l) {
    long j = j_indices[l], jb = jbar_indices[l];
    if (j < 0 || j >= system.n || jb < 0 || jb >= system.n)
      throw std::invalid_argument("estimator index out of range");
    Eigen::VectorXd kj = eval_kernel(system, step_index, i, static_cast<int>(j),
                                     system.states[i], system.states[j], counters);
    Eigen::VectorXd kjb = eval_kernel(system, step_index, i, static_cast<int>(jb),
                                      system.states[i], system.states[jb], counters);
    diffs.emplace_back(kj - kjb);
  }
  double coeff =
      1.0 / (2.0 * system.batch * static_cast<double>(j_indices.size()));
  return CovEstimate(coeff, std::move(diffs));
}

std::vector<Eigen::VectorXd> ccrbm_step(const ParticleSystem& system, long step_index,
                                        const std::vector<std::vector<long>>& indices,
                                        const std::vector<std::vector<long>>& est_j,
                                        const std::vector<std::vector<long>>& est_jbar,
                                        const std::vector<Eigen::VectorXd>& noises,
                                        RunCounters* counters) {
  validate(system);
  std::vector<Eigen::VectorXd> next(system.n);
  const double scale = system.step / (2.0 * system.diffusion * system.diffusion);
  for (int i = 0; i < system.n; ++i) {
    Eigen::VectorXd khat = batched_interaction(system, step_index, i, indices[i], counters);
    CovEstimate est = ccrbm_covariance_estimate(system, step_index, i, est_j[i],
                                                est_jbar[i], counters);
    Eigen::VectorXd eps_eff =
        noises[i] -
        scale * est.apply(noises[i], counters ? &counters->correction_ops : nullptr);
    next[i] = advance(system, system.states[i],
                      confine_at(system, step_index, i, system.states[i]), khat,
                      eps_eff);
  }
  return next;
}

ParticleRunResult run_particles(const ParticleSystem& system, Variant variant,
                                long horizon, std::uint64_t seed) {
  validate(system);
  ParticleRunResult out;
  if (variant == Variant::kCCRBM) {
    double ceiling = system.batch * system.diffusion * system.diffusion /
                     (40.0 * system.kernel_bound * system.kernel_bound * system.d);
    if (system.kernel_bound > 0.0 && system.step > ceiling) {
      out.warnings.push_back("eta exceeds B sigma^2 / (40 M^2 d) = " +
                             std::to_string(ceiling) +
                             "; the CC-RBM bound hypothesis is violated");
    }
  }

  ParticleSystem sys = system;
  out.snapshots.push_back(sys.states);
  for (long k = 0; k < horizon; ++k) {
    auto gauss_eng = rng::engine_for(seed, rng::Stream::kGaussian, k);
    std::vector<Eigen::VectorXd> noises(sys.n);
    for (int i = 0; i < sys.n; ++i) noises[i] = rng::standard_normal(sys.d, gauss_eng);

    std::vector<Eigen::VectorXd> next;
    switch (variant) {
      case Variant::kIPD: {
        next = ipd_step(sys, k, noises, &out.counters);
        break;
      }
      case Variant::kRBM:
      case Variant::kCCRBM: {
        auto idx_eng = rng::engine_for(seed, rng::Stream::kBatchIndices, k);
        std::vector<std::vector<long>> indices(sys.n, std::vector<long>(sys.batch));
        for (int i = 0; i < sys.n; ++i)
          for (int b = 0; b < sys.batch; ++b)
            indices[i][b] = rng::uniform_index(sys.n, idx_eng);
        if (variant == Variant::kRBM) {
          next = rbm_step(sys, k, indices, noises, &out.counters);
        } else {
          auto est_eng = rng::engine_for(seed, rng::Stream::kEstimatorIndices, k);
          std::vector<std::vector<long>> ej(sys.n, std::vector<long>(sys.estimator_batch));
          std::vector<std::vector<long>> ejb(sys.n, std::vector<long>(sys.estimator_batch));
          for (int i = 0; i < sys.n; ++i) {
            for (int l = 0; l < sys.estimator_batch; ++l) {
              ej[i][l] = rng::uniform_index(sys.n, est_eng);
              ejb[i][l] = rng::uniform_index(sys.n, est_eng);
            }
          }
          next = ccrbm_step(sys, k, indices, ej, ejb, noises, &out.counters);
        }
        break;
      }
    }
    sys.states = std::move(next);
    out.snapshots.push_back(sys.states);
  }
  return out;
}

KernelFn make_sine_kernel(double bound) {
  return [bound](long, int, int, const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    // Componentwise M sin(y - x), scaled so the vector norm stays <= M.
    Eigen::VectorXd v = (y - x).array().sin().matrix();
    double scale = bound / std::sqrt(static_cast<double>(x.size()));
    return Eigen::VectorXd(scale * v);
  };
}

KernelFn make_clipped_gradient_kernel(std::function<double(double)> psi_prime,
                                      double bound) {
  return [psi_prime, bound](long, int, int, const Eigen::VectorXd& x,
                            const Eigen::VectorXd& y) {
    Eigen::VectorXd diff = x - y;
    double r = diff.norm();
    if (r < 1e-300) return Eigen::VectorXd(Eigen::VectorXd::Zero(x.size()));
    Eigen::VectorXd force = -psi_prime(r) / r * diff;
    double norm = force.norm();
    if (norm > bound) force *= bound / norm;
    return force;
  };
}

ConfineFn make_linear_confine(double rate) {
  return [rate](long, int, const Eigen::VectorXd& x) {
    return Eigen::VectorXd(-rate * x);
  };
}

}  // namespace sgmcmc::particles
