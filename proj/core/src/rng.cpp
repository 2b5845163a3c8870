#include "sgmcmc/rng.hpp"

namespace sgmcmc::rng {

std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 33;
  x *= 0xff51afd7ed558ccdULL;
  x ^= x >> 33;
  x *= 0xc4ceb9fe1a85ec53ULL;
  x ^= x >> 33;
  return x;
}

std::uint64_t derive(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = mix64(seed + 0x9e3779b97f4a7c15ULL);
  for (std::uint64_t p : path) {
    h = mix64(h ^ mix64(p + 0x9e3779b97f4a7c15ULL));
  }
  return h;
}

SplitMix64 engine_for(std::uint64_t seed, Stream stream, std::uint64_t step) {
  return SplitMix64(derive(seed, {static_cast<std::uint64_t>(stream), step}));
}

Eigen::VectorXd standard_normal(int d, SplitMix64& eng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd out(d);
  for (int i = 0; i < d; ++i) out[i] = normal(eng);
  return out;
}

long uniform_index(long n, SplitMix64& eng) {
  std::uniform_int_distribution<long> dist(0, n - 1);
  return dist(eng);
}

double uniform_real(double lo, double hi, SplitMix64& eng) {
  std::uniform_real_distribution<double> dist(lo, hi);
  return dist(eng);
}

}  // namespace sgmcmc::rng
