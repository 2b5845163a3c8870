#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>
#include <random>

#include <Eigen/Core>

namespace sgmcmc::rng {

/// Counter-based splittable generator (splitmix64). Seeding costs one word,
/// so every (seed, step, purpose) triple gets its own cheap engine.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// Murmur3 avalanche, used to fold path components into a derived seed.
std::uint64_t mix64(std::uint64_t x);

/// Derives a child seed from a master seed and a path of counters.
/// derive(s, {a, b}) != derive(s, {a}) and children never collide in practice,
/// so adding sweep cells or steps never perturbs existing streams.
std::uint64_t derive(std::uint64_t seed, std::initializer_list<std::uint64_t> path);

/// Per-step stream purposes. Each purpose owns an independent engine so a
/// variant that skips a purpose (e.g. LMC drawing no batch indices) still
/// sees the same Gaussians as one that does not.
enum class Stream : std::uint64_t {
  kChainInit = 1,
  kBatchIndices = 2,
  kGaussian = 3,
  kEstimatorIndices = 4,
  kAveragedTime = 5,
  kCell = 6,
};

/// Engine for one purpose at one step of one seeded run.
SplitMix64 engine_for(std::uint64_t seed, Stream stream, std::uint64_t step);

/// d i.i.d. standard normal draws.
Eigen::VectorXd standard_normal(int d, SplitMix64& eng);

/// One uniform index in [0, n).
long uniform_index(long n, SplitMix64& eng);

double uniform_real(double lo, double hi, SplitMix64& eng);

}  // namespace sgmcmc::rng
