#include "sgmcmc/cov_estimate.hpp"

namespace sgmcmc {

Eigen::VectorXd CovEstimate::apply(const Eigen::VectorXd& x, std::uint64_t* ops) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(x.size());
  const auto d = static_cast<std::uint64_t>(x.size());
  for (const auto& f : factors_) {
    double s = f.dot(x);
    out += (coefficient_ * s) * f;
    if (ops) *ops += 4 * d + 1;  // dot: 2d-1, scaled axpy: 2d, coefficient fold: 2
  }
  return out;
}

double CovEstimate::trace() const {
  double t = 0.0;
  for (const auto& f : factors_) t += f.squaredNorm();
  return coefficient_ * t;
}

Eigen::MatrixXd CovEstimate::dense(int dim) const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
  for (const auto& f : factors_) m += coefficient_ * f * f.transpose();
  return m;
}

}  // namespace sgmcmc
