#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "sgmcmc/checks.hpp"
#include "sgmcmc/config.hpp"
#include "sgmcmc/runner.hpp"
#include "sgmcmc/serialize.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitCheckFailed = 3;

struct CommonOpts {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  int jobs = 1;
};

sgmcmc::config::ExperimentConfig load(const CommonOpts& opts) {
  auto cfg = sgmcmc::config::parse_config(opts.config_path);
  if (opts.seed) {
    cfg.seed = *opts.seed;
    cfg.raw["seed"] = *opts.seed;
  }
  if (opts.out) cfg.output_dir = *opts.out;
  return cfg;
}

int execute(const CommonOpts& opts, bool allow_sweep) {
  auto cfg = load(opts);
  if (!allow_sweep && !cfg.sweep.empty())
    throw sgmcmc::config::ConfigError(
        "this config declares a sweep; use the 'sweep' subcommand");
  auto report = sgmcmc::runner::run_experiment(cfg, opts.jobs);
  sgmcmc::runner::emit_report(report, cfg.output_dir);
  std::cout << report.summary_text;
  std::cout << "wrote " << cfg.output_dir << "/report.csv\n";
  return kExitOk;
}

int run_check(const std::optional<std::string>& out) {
  auto results = sgmcmc::checks::run_lemma_checks();
  bool all_ok = true;
  std::string csv = "check,pass,detail\n";
  for (const auto& r : results) {
    std::printf("[%s] %s  %s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(),
                r.detail.c_str());
    csv += r.name + "," + (r.pass ? "1" : "0") + ",\"" + r.detail + "\"\n";
    all_ok = all_ok && r.pass;
  }
  if (out) {
    sgmcmc::runner::RunReport report;
    report.report_csv = csv;
    report.summary_text = all_ok ? "all checks passed\n" : "CHECK FAILURES\n";
    sgmcmc::runner::emit_report(report, *out);
  }
  return all_ok ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Langevin and interacting-particle sampling experiments"};
  app.require_subcommand(1);

  CommonOpts run_opts, sweep_opts, bounds_opts;
  std::optional<std::string> check_out;

  auto add_common = [](CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("config", o.config_path, "experiment config file")->required();
    cmd->add_option("--seed", o.seed, "override the config seed");
    cmd->add_option("--out", o.out, "override the output directory");
    cmd->add_option("--jobs", o.jobs, "concurrent sweep cells")->default_val(1);
  };

  CLI::App* cmd_run = app.add_subcommand("run", "run a single experiment");
  add_common(cmd_run, run_opts);
  CLI::App* cmd_sweep = app.add_subcommand("sweep", "run every sweep cell");
  add_common(cmd_sweep, sweep_opts);
  CLI::App* cmd_bounds = app.add_subcommand("bounds", "evaluate a bound table");
  add_common(cmd_bounds, bounds_opts);
  CLI::App* cmd_check =
      app.add_subcommand("check", "run the lemma-verification suite");
  cmd_check->add_option("--out", check_out, "also write check results as CSV");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_run->parsed()) return execute(run_opts, /*allow_sweep=*/false);
    if (cmd_sweep->parsed()) return execute(sweep_opts, /*allow_sweep=*/true);
    if (cmd_bounds->parsed()) {
      auto cfg = load(bounds_opts);
      if (cfg.kind != sgmcmc::config::Kind::kBoundTable)
        throw sgmcmc::config::ConfigError("'bounds' needs a bound-table config");
      return execute(bounds_opts, /*allow_sweep=*/true);
    }
    if (cmd_check->parsed()) return run_check(check_out);
  } catch (const sgmcmc::config::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitOk;
}
