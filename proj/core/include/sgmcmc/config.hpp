#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "sgmcmc/bounds.hpp"
#include "sgmcmc/particles.hpp"
#include "sgmcmc/samplers.hpp"
#include "sgmcmc/targets.hpp"

namespace sgmcmc::config {

/// Configuration problems: malformed files, unknown keys, invalid values.
/// The CLI maps these to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Kind { kChain, kParticles, kNoiseScaling, kCltCheck, kBoundTable };

std::string kind_name(Kind k);

struct TargetConfig {
  std::string name;  // gaussian | finite_sum_quadratic | mixture
  int dimension = 1;
  double variance = 1.0;
  double curvature = 1.0;
  std::vector<Eigen::VectorXd> centers;
  std::vector<targets::MixtureMode> modes;

  targets::TargetSpec build() const;
  /// Oracle for finite-sum targets; throws for targets without one.
  targets::StochasticOracle build_oracle() const;
  bool has_oracle() const { return name == "finite_sum_quadratic"; }
};

struct ChainBlock {
  samplers::Variant variant = samplers::Variant::kLMC;
  double step = 0.0;
  int batch = 1;
  long horizon = 0;
  int estimator_batch = 0;
  std::optional<Eigen::VectorXd> x0;
};

struct ParticleBlock {
  particles::Variant variant = particles::Variant::kIPD;
  int n = 1;
  int dimension = 1;
  double sigma = 1.0;
  double step = 0.0;
  int batch = 1;
  int estimator_batch = 1;
  long horizon = 0;
  std::string kernel = "none";  // none | sine | clipped_quadratic
  double kernel_bound = 0.0;
  std::string confine = "none";  // none | linear
  double confine_rate = 0.0;
  double init_scale = 1.0;

  particles::ParticleSystem build(std::uint64_t seed) const;
};

struct NoiseScalingBlock {
  double eta = 0.0;
  std::vector<int> batch_sizes;
};

struct CltBlock {
  std::string lemma = "wass";  // wass | zhai
  double beta = 0.0;
  int dimension = 1;
  std::vector<int> batch_sizes;
  long quantile_points = 100000;
};

struct BoundTableBlock {
  std::string bound;
  bounds::BoundParams params;
};

struct SweepAxis {
  std::string parameter;               // dotted path, e.g. "chain.batch"
  std::vector<nlohmann::json> values;  // original JSON values
};

struct ExperimentConfig {
  Kind kind = Kind::kChain;
  std::uint64_t seed = 0;
  std::string output_dir = "out";
  TargetConfig target;
  ChainBlock chain;
  ParticleBlock particle;
  NoiseScalingBlock noise_scaling;
  CltBlock clt;
  BoundTableBlock bound_table;
  std::vector<SweepAxis> sweep;
  nlohmann::json raw;  // canonical parsed form, used for hashing and sweeps
};

/// Parses and validates a JSON experiment file. Unknown keys are rejected
/// with the offending key named; malformed files report line and column.
ExperimentConfig parse_config(const std::string& path);

/// Same, from an already-parsed JSON document.
ExperimentConfig parse_config_json(const nlohmann::json& j);

/// Number of planned runs (product of sweep axis lengths, at least 1).
std::size_t planned_runs(const ExperimentConfig& config);

/// Config for one sweep cell: the base JSON with each axis value patched in.
ExperimentConfig sweep_cell(const ExperimentConfig& config, std::size_t index);

}  // namespace sgmcmc::config
