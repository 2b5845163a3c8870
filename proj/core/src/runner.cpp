#include "sgmcmc/runner.hpp"

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "sgmcmc/cltlab.hpp"
#include "sgmcmc/serialize.hpp"

namespace sgmcmc::runner {

namespace {

using config::ExperimentConfig;
using config::Kind;
using serialize::format_double;

struct CellOutput {
  std::string hash;
  std::vector<std::pair<std::string, std::string>> files;
  std::vector<std::string> rows;
  std::vector<std::string> summary;
};

std::string cell_prefix(std::size_t index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "cell%03zu", index);
  return buf;
}

CellOutput run_chain_cell(const ExperimentConfig& cfg, std::size_t index,
                          std::uint64_t seed, const std::string& hash) {
  CellOutput out;
  out.hash = hash;
  targets::TargetSpec target = cfg.target.build();
  targets::StochasticOracle oracle;
  bool have_oracle = cfg.target.has_oracle();
  if (have_oracle) oracle = cfg.target.build_oracle();

  samplers::ChainConfig cc;
  cc.step = cfg.chain.step;
  cc.batch = cfg.chain.batch;
  cc.horizon = cfg.chain.horizon;
  cc.estimator_batch = cfg.chain.estimator_batch;
  cc.variant = cfg.chain.variant;
  cc.seed = seed;

  Eigen::VectorXd x0 = cfg.chain.x0
                           ? *cfg.chain.x0
                           : samplers::default_init(
                                 target, have_oracle ? &oracle : nullptr, seed);
  samplers::Trajectory traj = samplers::run_chain(
      target, have_oracle ? &oracle : nullptr, cc, x0);

  std::string prefix = cell_prefix(index);
  out.files.emplace_back(prefix + "_trajectory.csv",
                         serialize::trajectory_csv(traj));
  out.files.emplace_back(prefix + "_records.bin",
                         serialize::records_binary(x0, traj));

  double mean_noise = 0.0;
  for (const auto& r : traj.records) mean_noise += r.noise.norm();
  if (!traj.records.empty()) mean_noise /= static_cast<double>(traj.records.size());

  std::ostringstream row;
  row << index << "," << seed << "," << out.hash << ","
      << samplers::variant_name(cc.variant) << "," << format_double(cc.step) << ","
      << cc.batch << "," << cc.horizon << ","
      << format_double(traj.iterates.back().norm()) << ","
      << format_double(mean_noise);
  out.rows.push_back(row.str());
  for (const auto& w : traj.warnings) out.summary.push_back(prefix + ": " + w);
  return out;
}

CellOutput run_particles_cell(const ExperimentConfig& cfg, std::size_t index,
                              std::uint64_t seed, const std::string& hash) {
  CellOutput out;
  out.hash = hash;
  particles::ParticleSystem system = cfg.particle.build(seed);
  particles::ParticleRunResult res =
      particles::run_particles(system, cfg.particle.variant, cfg.particle.horizon, seed);

  std::string prefix = cell_prefix(index);
  out.files.emplace_back(prefix + "_snapshots.csv",
                         serialize::snapshots_csv(res.snapshots));
  std::ostringstream row;
  row << index << "," << seed << "," << out.hash << ","
      << particles::variant_name(cfg.particle.variant) << "," << cfg.particle.n
      << "," << cfg.particle.dimension << "," << cfg.particle.batch << ","
      << cfg.particle.estimator_batch << "," << cfg.particle.horizon << ","
      << res.counters.kernel_evals << "," << res.counters.correction_ops;
  out.rows.push_back(row.str());
  for (const auto& w : res.warnings) out.summary.push_back(prefix + ": " + w);
  return out;
}

CellOutput run_noise_scaling_cell(const ExperimentConfig& cfg, std::size_t index,
                                  std::uint64_t seed, const std::string& hash) {
  CellOutput out;
  out.hash = hash;
  targets::StochasticOracle oracle = cfg.target.build_oracle();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(cfg.target.dimension);
  const double eta = cfg.noise_scaling.eta;

  std::vector<std::pair<double, double>> unc, cor;
  for (int b : cfg.noise_scaling.batch_sizes) {
    auto law = cltlab::enumerate_noise_law(oracle, x, b);
    double ku = cltlab::per_step_noise_kl(law, eta, false, 0.0);
    double kc = cltlab::per_step_noise_kl(law, eta, true, law.variance_1d());
    unc.emplace_back(b, ku);
    cor.emplace_back(b, kc);
  }
  double slope_u = cltlab::fit_batch_scaling(unc);
  double slope_c = cltlab::fit_batch_scaling(cor);

  for (std::size_t i = 0; i < unc.size(); ++i) {
    std::ostringstream row;
    row << index << "," << seed << "," << out.hash << "," << unc[i].first << ","
        << format_double(std::log(unc[i].first)) << ","
        << format_double(unc[i].second) << ","
        << format_double(std::log(unc[i].second)) << ","
        << format_double(cor[i].second) << ","
        << format_double(std::log(cor[i].second)) << "," << format_double(slope_u)
        << "," << format_double(slope_c);
    out.rows.push_back(row.str());
  }
  std::ostringstream sum;
  sum << cell_prefix(index) << ": slope_uncorrected=" << format_double(slope_u)
      << " slope_corrected=" << format_double(slope_c);
  out.summary.push_back(sum.str());
  return out;
}

CellOutput run_clt_cell(const ExperimentConfig& cfg, std::size_t index,
                        std::uint64_t seed, const std::string& hash) {
  CellOutput out;
  out.hash = hash;
  for (int b : cfg.clt.batch_sizes) {
    cltlab::CltExperimentConfig ec;
    ec.beta = cfg.clt.beta;
    ec.batch = b;
    ec.dim = cfg.clt.dimension;
    ec.quantile_points = cfg.clt.quantile_points;
    ec.seed = seed;
    cltlab::CltResult res = (cfg.clt.lemma == "wass")
                                ? cltlab::wass_clt_experiment(ec)
                                : cltlab::zhai_clt_experiment(ec);
    std::ostringstream row;
    row << index << "," << seed << "," << out.hash << "," << cfg.clt.lemma << ","
        << b << "," << format_double(res.measured_w2sq) << ","
        << format_double(res.bound) << ","
        << ((res.measured_w2sq <= res.bound) ? 1 : 0);
    out.rows.push_back(row.str());
  }
  return out;
}

CellOutput run_bound_cell(const ExperimentConfig& cfg, std::size_t index,
                          std::uint64_t seed, const std::string& hash) {
  CellOutput out;
  out.hash = hash;
  const auto& name = cfg.bound_table.bound;
  const auto& p = cfg.bound_table.params;
  std::vector<bounds::BoundReport> reports;
  if (name == "sgld_lsi") {
    reports.push_back(bounds::bound_sgld_lsi(p));
  } else if (name == "absgld_lsi") {
    auto r = bounds::bound_absgld_lsi(p);
    reports.push_back(r.kl);
    reports.push_back(r.amortized_batch);
  } else if (name == "sgld_fd_pi") {
    auto r = bounds::bound_sgld_fd_pi(p);
    reports.push_back(r.fisher);
    if (r.tv_sq) reports.push_back(*r.tv_sq);
  } else if (name == "sgld_traj_kl") {
    reports.push_back(bounds::bound_sgld_traj_kl(p));
  } else if (name == "ccsgld_traj_kl") {
    reports.push_back(bounds::bound_ccsgld_traj_kl(p));
  } else if (name == "rbm_traj_kl") {
    reports.push_back(bounds::bound_rbm_traj_kl(p));
  } else if (name == "ccrbm_traj_kl") {
    reports.push_back(bounds::bound_ccrbm_traj_kl(p));
  }

  std::string prefix = cell_prefix(index);
  out.files.emplace_back(prefix + "_bounds.csv", serialize::bound_report_csv(reports));
  std::string table;
  for (const auto& r : reports) table += serialize::bound_report_table(r);
  out.files.emplace_back(prefix + "_bounds.txt", table);

  for (const auto& r : reports) {
    for (const auto& t : r.terms) {
      std::ostringstream row;
      row << index << "," << seed << "," << out.hash << "," << r.name << ",\""
          << t.expression << "\"," << format_double(t.value);
      out.rows.push_back(row.str());
    }
    std::ostringstream row;
    row << index << "," << seed << "," << out.hash << "," << r.name << ",total,"
        << format_double(r.total);
    out.rows.push_back(row.str());
    for (const auto& w : r.warnings)
      out.summary.push_back(prefix + " " + r.name + ": " + w);
  }
  return out;
}

std::string header_for(Kind kind) {
  switch (kind) {
    case Kind::kChain:
      return "cell,seed,config_hash,variant,eta,batch,horizon,final_norm,mean_noise_norm";
    case Kind::kParticles:
      return "cell,seed,config_hash,variant,n,d,batch,estimator_batch,horizon,"
             "kernel_evals,correction_ops";
    case Kind::kNoiseScaling:
      return "cell,seed,config_hash,B,log_B,kl_uncorrected,log_kl_uncorrected,"
             "kl_corrected,log_kl_corrected,slope_uncorrected,slope_corrected";
    case Kind::kCltCheck:
      return "cell,seed,config_hash,lemma,B,measured_w2sq,bound,pass";
    case Kind::kBoundTable:
      return "cell,seed,config_hash,bound,term,value";
  }
  return "";
}

}  // namespace

std::uint64_t cell_seed(std::uint64_t config_seed, std::size_t cell_index) {
  return rng::derive(config_seed, {static_cast<std::uint64_t>(rng::Stream::kCell),
                                   static_cast<std::uint64_t>(cell_index)});
}

RunReport run_experiment(const config::ExperimentConfig& cfg, int jobs) {
  auto start = std::chrono::steady_clock::now();
  if (jobs < 1) jobs = 1;
  const std::size_t cells = config::planned_runs(cfg);

  RunReport report;
  report.config_hash = serialize::fnv1a_hex(cfg.raw.dump());

  std::vector<CellOutput> outputs(cells);
  std::atomic<std::size_t> next{0};
  std::vector<std::string> errors(cells);
  auto work = [&]() {
    while (true) {
      std::size_t i = next.fetch_add(1);
      if (i >= cells) break;
      try {
        config::ExperimentConfig cell = config::sweep_cell(cfg, i);
        std::uint64_t seed = cell_seed(cell.seed, i);
        std::string hash = serialize::fnv1a_hex(cell.raw.dump());
        switch (cell.kind) {
          case Kind::kChain:
            outputs[i] = run_chain_cell(cell, i, seed, hash);
            break;
          case Kind::kParticles:
            outputs[i] = run_particles_cell(cell, i, seed, hash);
            break;
          case Kind::kNoiseScaling:
            outputs[i] = run_noise_scaling_cell(cell, i, seed, hash);
            break;
          case Kind::kCltCheck:
            outputs[i] = run_clt_cell(cell, i, seed, hash);
            break;
          case Kind::kBoundTable:
            outputs[i] = run_bound_cell(cell, i, seed, hash);
            break;
        }
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };

  if (jobs == 1 || cells <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    int n_threads = std::min<std::size_t>(jobs, cells);
    pool.reserve(n_threads);
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (std::size_t i = 0; i < cells; ++i) {
    if (!errors[i].empty())
      throw std::runtime_error("cell " + std::to_string(i) + ": " + errors[i]);
  }

  std::ostringstream csv;
  csv << header_for(cfg.kind) << "\n";
  std::ostringstream summary;
  summary << "kind: " << config::kind_name(cfg.kind) << "\n";
  summary << "config_hash: " << report.config_hash << "\n";
  summary << "planned_runs: " << cells << "\n";
  for (std::size_t i = 0; i < cells; ++i) {
    for (const auto& row : outputs[i].rows) csv << row << "\n";
    for (const auto& line : outputs[i].summary) summary << line << "\n";
    for (auto& f : outputs[i].files) report.files.push_back(std::move(f));
  }
  report.report_csv = csv.str();
  report.summary_text = summary.str();
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

void emit_report(const RunReport& report, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir);

  auto write = [&](const std::string& name, const std::string& contents) {
    fs::path p = fs::path(dir) / name;
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + p.string() + " for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw std::runtime_error("failed writing " + p.string());
  };

  write("report.csv", report.report_csv);
  write("summary.txt", report.summary_text);
  for (const auto& [name, contents] : report.files) write(name, contents);

  // timings are not byte-stable; they live in their own log
  std::ofstream log(fs::path(dir) / "timing.log", std::ios::app);
  log << "wall_seconds=" << report.wall_seconds << "\n";
}

}  // namespace sgmcmc::runner
