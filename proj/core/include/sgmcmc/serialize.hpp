#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "sgmcmc/bounds.hpp"
#include "sgmcmc/samplers.hpp"

namespace sgmcmc::serialize {

/// Shortest round-trip decimal form; byte-stable across reruns.
std::string format_double(double v);

/// 64-bit FNV-1a of a string, as fixed-width hex.
std::string fnv1a_hex(const std::string& data);

/// Columns: step, x[0..d), B_k, noise_norm. Row k carries the batch size and
/// noise norm of the step leaving iterate k; the final row carries zeros.
std::string trajectory_csv(const samplers::Trajectory& trajectory);

/// Binary sidecar with x0 and the per-step records, enough for bit-exact
/// replay through replay_trajectory.
std::string records_binary(const Eigen::VectorXd& x0,
                           const samplers::Trajectory& trajectory);

struct RecordLog {
  Eigen::VectorXd x0;
  samplers::Trajectory trajectory;  // iterates left empty, records filled
};

RecordLog read_records_binary(const std::string& bytes);

/// Columns: step, particle, x[0..d).
std::string snapshots_csv(const std::vector<std::vector<Eigen::VectorXd>>& snapshots);

/// Rows: name, term expression, value; ends with the total row.
std::string bound_report_csv(const std::vector<bounds::BoundReport>& reports);

/// Aligned human-readable table for one report.
std::string bound_report_table(const bounds::BoundReport& report);

}  // namespace sgmcmc::serialize
