#include "sgmcmc/config.hpp"

#include <fstream>
#include <set>

namespace sgmcmc::config {

namespace {

using nlohmann::json;

void expect_keys(const json& obj, const std::string& where,
                 const std::set<std::string>& allowed) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key()))
      throw ConfigError(where + ": unknown key '" + it.key() + "'");
  }
}

double get_number(const json& obj, const std::string& where, const std::string& key,
                  std::optional<double> fallback = std::nullopt) {
  if (!obj.contains(key)) {
    if (fallback) return *fallback;
    throw ConfigError(where + ": missing key '" + key + "'");
  }
  if (!obj[key].is_number()) throw ConfigError(where + "." + key + ": expected a number");
  return obj[key].get<double>();
}

long get_integer(const json& obj, const std::string& where, const std::string& key,
                 std::optional<long> fallback = std::nullopt) {
  if (!obj.contains(key)) {
    if (fallback) return *fallback;
    throw ConfigError(where + ": missing key '" + key + "'");
  }
  const json& v = obj[key];
  if (v.is_number_integer()) return v.get<long>();
  if (v.is_number_float()) {
    double d = v.get<double>();
    if (d == static_cast<long>(d)) return static_cast<long>(d);
  }
  throw ConfigError(where + "." + key + ": expected an integer");
}

std::string get_string(const json& obj, const std::string& where,
                       const std::string& key,
                       std::optional<std::string> fallback = std::nullopt) {
  if (!obj.contains(key)) {
    if (fallback) return *fallback;
    throw ConfigError(where + ": missing key '" + key + "'");
  }
  if (!obj[key].is_string()) throw ConfigError(where + "." + key + ": expected a string");
  return obj[key].get<std::string>();
}

Eigen::VectorXd get_vector(const json& v, const std::string& where) {
  if (!v.is_array() || v.empty()) throw ConfigError(where + ": expected a nonempty array");
  Eigen::VectorXd out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) throw ConfigError(where + ": expected numbers");
    out[static_cast<int>(i)] = v[i].get<double>();
  }
  return out;
}

TargetConfig parse_target(const json& j) {
  expect_keys(j, "target",
              {"name", "dimension", "variance", "curvature", "centers", "modes"});
  TargetConfig t;
  t.name = get_string(j, "target", "name");
  if (t.name == "gaussian") {
    t.dimension = static_cast<int>(get_integer(j, "target", "dimension"));
    t.variance = get_number(j, "target", "variance", 1.0);
  } else if (t.name == "finite_sum_quadratic") {
    if (!j.contains("centers")) throw ConfigError("target: missing key 'centers'");
    for (const auto& c : j["centers"]) t.centers.push_back(get_vector(c, "target.centers"));
    t.curvature = get_number(j, "target", "curvature", 1.0);
    t.dimension = static_cast<int>(t.centers.at(0).size());
  } else if (t.name == "mixture") {
    if (!j.contains("modes")) throw ConfigError("target: missing key 'modes'");
    for (const auto& m : j["modes"]) {
      expect_keys(m, "target.modes[]", {"weight", "mean", "variance"});
      targets::MixtureMode mode;
      mode.weight = get_number(m, "target.modes[]", "weight");
      mode.mean = get_vector(m["mean"], "target.modes[].mean");
      mode.variance = get_number(m, "target.modes[]", "variance");
      t.modes.push_back(std::move(mode));
    }
    t.dimension = static_cast<int>(t.modes.at(0).mean.size());
  } else {
    throw ConfigError("target.name: unknown target '" + t.name + "'");
  }
  return t;
}

ChainBlock parse_chain(const json& j) {
  expect_keys(j, "chain",
              {"variant", "step", "batch", "horizon", "estimator_batch", "x0"});
  ChainBlock c;
  try {
    c.variant = samplers::variant_from_name(get_string(j, "chain", "variant"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("chain.variant: ") + e.what());
  }
  c.step = get_number(j, "chain", "step");
  if (!(c.step > 0.0)) throw ConfigError("chain.step: must be > 0");
  c.batch = static_cast<int>(get_integer(j, "chain", "batch", 1));
  if (c.batch < 1) throw ConfigError("chain.batch: must be >= 1");
  c.horizon = get_integer(j, "chain", "horizon");
  if (c.horizon < 0) throw ConfigError("chain.horizon: must be >= 0");
  c.estimator_batch = static_cast<int>(get_integer(j, "chain", "estimator_batch", 0));
  if (j.contains("x0")) c.x0 = get_vector(j["x0"], "chain.x0");
  return c;
}

ParticleBlock parse_particles(const json& j) {
  expect_keys(j, "particles",
              {"variant", "n", "dimension", "sigma", "step", "batch",
               "estimator_batch", "horizon", "kernel", "kernel_bound", "confine",
               "confine_rate", "init_scale"});
  ParticleBlock p;
  try {
    p.variant = particles::variant_from_name(get_string(j, "particles", "variant"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("particles.variant: ") + e.what());
  }
  p.n = static_cast<int>(get_integer(j, "particles", "n"));
  p.dimension = static_cast<int>(get_integer(j, "particles", "dimension"));
  p.sigma = get_number(j, "particles", "sigma", 1.0);
  p.step = get_number(j, "particles", "step");
  if (!(p.step > 0.0)) throw ConfigError("particles.step: must be > 0");
  p.batch = static_cast<int>(get_integer(j, "particles", "batch", 1));
  p.estimator_batch = static_cast<int>(get_integer(j, "particles", "estimator_batch", 1));
  p.horizon = get_integer(j, "particles", "horizon");
  p.kernel = get_string(j, "particles", "kernel", std::string("none"));
  p.kernel_bound = get_number(j, "particles", "kernel_bound", 0.0);
  p.confine = get_string(j, "particles", "confine", std::string("none"));
  p.confine_rate = get_number(j, "particles", "confine_rate", 0.0);
  p.init_scale = get_number(j, "particles", "init_scale", 1.0);
  if (p.kernel != "none" && p.kernel != "sine" && p.kernel != "clipped_quadratic")
    throw ConfigError("particles.kernel: unknown kernel '" + p.kernel + "'");
  if (p.confine != "none" && p.confine != "linear")
    throw ConfigError("particles.confine: unknown confine '" + p.confine + "'");
  return p;
}

NoiseScalingBlock parse_noise_scaling(const json& j) {
  expect_keys(j, "noise_scaling", {"eta", "batch_sizes"});
  NoiseScalingBlock b;
  b.eta = get_number(j, "noise_scaling", "eta");
  if (!(b.eta > 0.0)) throw ConfigError("noise_scaling.eta: must be > 0");
  if (!j.contains("batch_sizes") || !j["batch_sizes"].is_array() ||
      j["batch_sizes"].empty())
    throw ConfigError("noise_scaling.batch_sizes: expected a nonempty array");
  for (const auto& v : j["batch_sizes"])
    b.batch_sizes.push_back(static_cast<int>(v.get<long>()));
  return b;
}

CltBlock parse_clt(const json& j) {
  expect_keys(j, "clt", {"lemma", "beta", "dimension", "batch_sizes", "quantile_points"});
  CltBlock c;
  c.lemma = get_string(j, "clt", "lemma", std::string("wass"));
  if (c.lemma != "wass" && c.lemma != "zhai")
    throw ConfigError("clt.lemma: unknown lemma '" + c.lemma + "'");
  c.beta = get_number(j, "clt", "beta");
  c.dimension = static_cast<int>(get_integer(j, "clt", "dimension", 1));
  if (!j.contains("batch_sizes") || !j["batch_sizes"].is_array() ||
      j["batch_sizes"].empty())
    throw ConfigError("clt.batch_sizes: expected a nonempty array");
  for (const auto& v : j["batch_sizes"])
    c.batch_sizes.push_back(static_cast<int>(v.get<long>()));
  c.quantile_points = get_integer(j, "clt", "quantile_points", 100000);
  return c;
}

BoundTableBlock parse_bounds(const json& j) {
  expect_keys(j, "bounds", {"bound", "params"});
  BoundTableBlock b;
  b.bound = get_string(j, "bounds", "bound");
  const std::set<std::string> known = {
      "sgld_lsi",       "absgld_lsi",    "sgld_fd_pi",   "sgld_traj_kl",
      "ccsgld_traj_kl", "rbm_traj_kl",   "ccrbm_traj_kl"};
  if (!known.count(b.bound))
    throw ConfigError("bounds.bound: unknown bound '" + b.bound + "'");
  if (!j.contains("params")) throw ConfigError("bounds: missing key 'params'");
  const json& p = j["params"];
  expect_keys(p, "bounds.params",
              {"eta", "batch", "horizon", "dim", "M", "G", "L", "sigma", "n",
               "estimator_batch", "C2", "C4", "C6", "lsi", "pi", "kl0", "m1", "m2"});
  bounds::BoundParams& bp = b.params;
  bp.eta = get_number(p, "bounds.params", "eta");
  bp.batch = get_number(p, "bounds.params", "batch", 1.0);
  bp.horizon = get_number(p, "bounds.params", "horizon", 0.0);
  bp.dim = get_number(p, "bounds.params", "dim", 1.0);
  bp.growth_m = get_number(p, "bounds.params", "M", 0.0);
  bp.growth_g = get_number(p, "bounds.params", "G", 0.0);
  bp.smoothness_l = get_number(p, "bounds.params", "L", 0.0);
  bp.sigma = get_number(p, "bounds.params", "sigma", 1.0);
  bp.particles = get_number(p, "bounds.params", "n", 1.0);
  bp.estimator_batch = get_number(p, "bounds.params", "estimator_batch", 1.0);
  bp.c2 = get_number(p, "bounds.params", "C2", 1.0);
  bp.c4 = get_number(p, "bounds.params", "C4", 1.0);
  bp.c6 = get_number(p, "bounds.params", "C6", 1.0);
  if (p.contains("lsi")) bp.lsi_constant = p["lsi"].get<double>();
  if (p.contains("pi")) bp.pi_constant = p["pi"].get<double>();
  if (p.contains("kl0")) bp.initial_kl = p["kl0"].get<double>();
  if (p.contains("m1")) bp.m1 = p["m1"].get<double>();
  if (p.contains("m2")) bp.m2 = p["m2"].get<double>();
  return b;
}

}  // namespace

std::string kind_name(Kind k) {
  switch (k) {
    case Kind::kChain: return "chain";
    case Kind::kParticles: return "particles";
    case Kind::kNoiseScaling: return "noise-scaling";
    case Kind::kCltCheck: return "clt-check";
    case Kind::kBoundTable: return "bound-table";
  }
  return "?";
}

targets::TargetSpec TargetConfig::build() const {
  if (name == "gaussian") return targets::make_gaussian_target(dimension, variance);
  if (name == "finite_sum_quadratic")
    return targets::make_finite_sum_quadratic(centers, curvature).first;
  if (name == "mixture") return targets::make_mixture_target(modes);
  throw ConfigError("unknown target '" + name + "'");
}

targets::StochasticOracle TargetConfig::build_oracle() const {
  if (name == "finite_sum_quadratic")
    return targets::make_finite_sum_quadratic(centers, curvature).second;
  throw ConfigError("target '" + name + "' has no stochastic oracle");
}

particles::ParticleSystem ParticleBlock::build(std::uint64_t seed) const {
  particles::ParticleSystem s;
  s.n = n;
  s.d = dimension;
  s.diffusion = sigma;
  s.step = step;
  s.batch = batch;
  s.estimator_batch = estimator_batch;
  s.kernel_bound = kernel_bound;
  if (kernel == "sine") {
    s.interact = particles::make_sine_kernel(kernel_bound);
  } else if (kernel == "clipped_quadratic") {
    s.interact = particles::make_clipped_gradient_kernel(
        [](double r) { return r; }, kernel_bound);
  }
  if (confine == "linear") s.confine = particles::make_linear_confine(confine_rate);
  auto eng = rng::engine_for(seed, rng::Stream::kChainInit, 0);
  s.states.reserve(n);
  for (int i = 0; i < n; ++i)
    s.states.push_back(init_scale * rng::standard_normal(dimension, eng));
  return s;
}

ExperimentConfig parse_config_json(const nlohmann::json& j) {
  expect_keys(j, "config",
              {"kind", "seed", "output", "target", "chain", "particles",
               "noise_scaling", "clt", "bounds", "sweep"});
  ExperimentConfig cfg;
  cfg.raw = j;
  std::string kind = get_string(j, "config", "kind");
  cfg.seed = static_cast<std::uint64_t>(get_integer(j, "config", "seed", 0));
  cfg.output_dir = get_string(j, "config", "output", std::string("out"));

  if (kind == "chain") {
    cfg.kind = Kind::kChain;
    if (!j.contains("target")) throw ConfigError("chain config: missing 'target'");
    if (!j.contains("chain")) throw ConfigError("chain config: missing 'chain'");
    cfg.target = parse_target(j["target"]);
    cfg.chain = parse_chain(j["chain"]);
    bool stochastic = cfg.chain.variant != samplers::Variant::kLMC;
    if (stochastic && !cfg.target.has_oracle())
      throw ConfigError("chain config: variant " +
                        samplers::variant_name(cfg.chain.variant) +
                        " needs a target with a stochastic oracle");
  } else if (kind == "particles") {
    cfg.kind = Kind::kParticles;
    if (!j.contains("particles")) throw ConfigError("particles config: missing 'particles'");
    cfg.particle = parse_particles(j["particles"]);
  } else if (kind == "noise-scaling") {
    cfg.kind = Kind::kNoiseScaling;
    if (!j.contains("target")) throw ConfigError("noise-scaling config: missing 'target'");
    if (!j.contains("noise_scaling"))
      throw ConfigError("noise-scaling config: missing 'noise_scaling'");
    cfg.target = parse_target(j["target"]);
    if (!cfg.target.has_oracle())
      throw ConfigError("noise-scaling config: target needs a stochastic oracle");
    cfg.noise_scaling = parse_noise_scaling(j["noise_scaling"]);
  } else if (kind == "clt-check") {
    cfg.kind = Kind::kCltCheck;
    if (!j.contains("clt")) throw ConfigError("clt-check config: missing 'clt'");
    cfg.clt = parse_clt(j["clt"]);
  } else if (kind == "bound-table") {
    cfg.kind = Kind::kBoundTable;
    if (!j.contains("bounds")) throw ConfigError("bound-table config: missing 'bounds'");
    cfg.bound_table = parse_bounds(j["bounds"]);
  } else {
    throw ConfigError("kind: unknown experiment kind '" + kind + "'");
  }

  if (j.contains("sweep")) {
    if (!j["sweep"].is_array()) throw ConfigError("sweep: expected an array");
    for (const auto& axis : j["sweep"]) {
      expect_keys(axis, "sweep[]", {"parameter", "values"});
      SweepAxis a;
      a.parameter = get_string(axis, "sweep[]", "parameter");
      if (!axis.contains("values") || !axis["values"].is_array() ||
          axis["values"].empty())
        throw ConfigError("sweep[].values: expected a nonempty array");
      for (const auto& v : axis["values"]) a.values.push_back(v);
      // the axis must reference an existing parameter
      std::string pointer = "/";
      for (char c : a.parameter) pointer += (c == '.') ? '/' : c;
      if (!j.contains(json::json_pointer(pointer)))
        throw ConfigError("sweep parameter '" + a.parameter +
                          "' does not reference an existing key");
      cfg.sweep.push_back(std::move(a));
    }
  }
  return cfg;
}

ExperimentConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    // byte offset -> line / column for the error message
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError("parse error in " + path + " at line " + std::to_string(line) +
                      ", column " + std::to_string(col) + ": " + e.what());
  }
  return parse_config_json(j);
}

std::size_t planned_runs(const ExperimentConfig& config) {
  std::size_t n = 1;
  for (const auto& a : config.sweep) n *= a.values.size();
  return n;
}

ExperimentConfig sweep_cell(const ExperimentConfig& config, std::size_t index) {
  nlohmann::json cell = config.raw;
  cell.erase("sweep");
  std::size_t rest = index;
  // row-major over the axes, last axis fastest
  std::vector<std::size_t> choice(config.sweep.size(), 0);
  for (std::size_t a = config.sweep.size(); a-- > 0;) {
    choice[a] = rest % config.sweep[a].values.size();
    rest /= config.sweep[a].values.size();
  }
  if (rest != 0) throw ConfigError("sweep cell index out of range");
  for (std::size_t a = 0; a < config.sweep.size(); ++a) {
    std::string pointer = "/";
    for (char c : config.sweep[a].parameter) pointer += (c == '.') ? '/' : c;
    cell[nlohmann::json::json_pointer(pointer)] = config.sweep[a].values[choice[a]];
  }
  return parse_config_json(cell);
}

}  // namespace sgmcmc::config
