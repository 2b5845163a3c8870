#include "sgmcmc/serialize.hpp"

#include <cstdio>
#include <cstring>
#include <sstream>
#include <stdexcept>

namespace sgmcmc::serialize {

namespace {

constexpr char kMagic[8] = {'S', 'G', 'M', 'C', 'R', 'E', 'C', '1'};

template <typename T>
void put(std::string& out, const T& v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

template <typename T>
T take(const std::string& in, std::size_t& pos) {
  if (pos + sizeof(T) > in.size())
    throw std::runtime_error("record log: truncated payload");
  T v;
  std::memcpy(&v, in.data() + pos, sizeof(T));
  pos += sizeof(T);
  return v;
}

void put_vector(std::string& out, const Eigen::VectorXd& v) {
  for (int i = 0; i < v.size(); ++i) put<double>(out, v[i]);
}

Eigen::VectorXd take_vector(const std::string& in, std::size_t& pos, int d) {
  Eigen::VectorXd v(d);
  for (int i = 0; i < d; ++i) v[i] = take<double>(in, pos);
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fnv1a_hex(const std::string& data) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string trajectory_csv(const samplers::Trajectory& trajectory) {
  std::ostringstream os;
  const int d = trajectory.iterates.empty()
                    ? 0
                    : static_cast<int>(trajectory.iterates[0].size());
  os << "step";
  for (int i = 0; i < d; ++i) os << ",x" << i;
  os << ",B_k,noise_norm\n";
  for (std::size_t k = 0; k < trajectory.iterates.size(); ++k) {
    os << k;
    for (int i = 0; i < d; ++i)
      os << "," << format_double(trajectory.iterates[k][i]);
    if (k < trajectory.records.size()) {
      os << "," << trajectory.records[k].batch_used << ","
         << format_double(trajectory.records[k].noise.norm());
    } else {
      os << ",0,0";
    }
    os << "\n";
  }
  return os.str();
}

std::string records_binary(const Eigen::VectorXd& x0,
                           const samplers::Trajectory& trajectory) {
  std::string out;
  out.append(kMagic, sizeof(kMagic));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(x0.size()));
  put<std::uint64_t>(out, trajectory.records.size());
  put<double>(out, trajectory.eta);
  put<std::uint8_t>(out, static_cast<std::uint8_t>(trajectory.variant));
  put_vector(out, x0);
  for (const auto& r : trajectory.records) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(r.batch_used));
    put<std::uint8_t>(out, r.corrected ? 1 : 0);
    put_vector(out, r.grad_estimate);
    put_vector(out, r.gauss);
    put_vector(out, r.noise);
    put_vector(out, r.correction);
  }
  return out;
}

RecordLog read_records_binary(const std::string& bytes) {
  std::size_t pos = 0;
  if (bytes.size() < sizeof(kMagic) ||
      std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0)
    throw std::runtime_error("record log: bad magic");
  pos = sizeof(kMagic);
  RecordLog log;
  int d = static_cast<int>(take<std::uint32_t>(bytes, pos));
  std::uint64_t steps = take<std::uint64_t>(bytes, pos);
  log.trajectory.eta = take<double>(bytes, pos);
  log.trajectory.variant =
      static_cast<samplers::Variant>(take<std::uint8_t>(bytes, pos));
  log.x0 = take_vector(bytes, pos, d);
  log.trajectory.records.reserve(steps);
  for (std::uint64_t k = 0; k < steps; ++k) {
    samplers::StepRecord r;
    r.batch_used = static_cast<int>(take<std::uint32_t>(bytes, pos));
    r.corrected = take<std::uint8_t>(bytes, pos) != 0;
    r.grad_estimate = take_vector(bytes, pos, d);
    r.gauss = take_vector(bytes, pos, d);
    r.noise = take_vector(bytes, pos, d);
    r.correction = take_vector(bytes, pos, d);
    log.trajectory.records.push_back(std::move(r));
  }
  return log;
}

std::string snapshots_csv(const std::vector<std::vector<Eigen::VectorXd>>& snapshots) {
  std::ostringstream os;
  const int d = (snapshots.empty() || snapshots[0].empty())
                    ? 0
                    : static_cast<int>(snapshots[0][0].size());
  os << "step,particle";
  for (int i = 0; i < d; ++i) os << ",x" << i;
  os << "\n";
  for (std::size_t k = 0; k < snapshots.size(); ++k) {
    for (std::size_t p = 0; p < snapshots[k].size(); ++p) {
      os << k << "," << p;
      for (int i = 0; i < d; ++i) os << "," << format_double(snapshots[k][p][i]);
      os << "\n";
    }
  }
  return os.str();
}

std::string bound_report_csv(const std::vector<bounds::BoundReport>& reports) {
  std::ostringstream os;
  os << "bound,term,value\n";
  for (const auto& r : reports) {
    for (const auto& t : r.terms)
      os << r.name << ",\"" << t.expression << "\"," << format_double(t.value)
         << "\n";
    os << r.name << ",total," << format_double(r.total) << "\n";
  }
  return os.str();
}

std::string bound_report_table(const bounds::BoundReport& report) {
  std::ostringstream os;
  os << report.name;
  if (report.order_level) os << "  (up to universal constants)";
  os << "\n";
  std::size_t width = 5;
  for (const auto& t : report.terms) width = std::max(width, t.expression.size());
  for (const auto& t : report.terms) {
    os << "  " << t.expression;
    os << std::string(width - t.expression.size() + 2, ' ');
    os << format_double(t.value) << "\n";
  }
  os << "  total" << std::string(width - 5 + 2, ' ') << format_double(report.total)
     << "\n";
  for (const auto& w : report.warnings) os << "  warning: " << w << "\n";
  return os.str();
}

}  // namespace sgmcmc::serialize
