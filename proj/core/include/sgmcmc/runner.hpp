#pragma once

#include <string>
#include <utility>
#include <vector>

#include "sgmcmc/config.hpp"

namespace sgmcmc::runner {

/// Deterministic experiment output: every byte is a function of the config
/// and its seed. Wall-clock timing is kept separate so emitted files stay
/// byte-stable across reruns.
struct RunReport {
  std::string config_hash;
  std::string report_csv;
  std::string summary_text;
  std::vector<std::pair<std::string, std::string>> files;  // name -> contents
  double wall_seconds = 0.0;
};

/// Runs every sweep cell (possibly concurrently; results are assembled in
/// cell order, so the output does not depend on `jobs`).
RunReport run_experiment(const config::ExperimentConfig& config, int jobs = 1);

/// Writes report.csv, summary.txt and the per-cell artifacts under `dir`;
/// timing goes to timing.log.
void emit_report(const RunReport& report, const std::string& dir);

/// Per-run seed for a sweep cell: derive(config seed, cell index). Appending
/// values to a sweep never changes the seeds of existing cells.
std::uint64_t cell_seed(std::uint64_t config_seed, std::size_t cell_index);

}  // namespace sgmcmc::runner
