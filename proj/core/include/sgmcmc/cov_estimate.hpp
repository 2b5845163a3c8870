#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

namespace sgmcmc {

/// Rank-limited covariance estimate coefficient * sum_j d_j d_j^T, stored as
/// the raw difference factors so matrix-vector products cost O(d * rank).
/// The matrix square root is never formed.
class CovEstimate {
 public:
  CovEstimate() = default;
  CovEstimate(double coefficient, std::vector<Eigen::VectorXd> factors)
      : coefficient_(coefficient), factors_(std::move(factors)) {}

  static CovEstimate Zero() { return CovEstimate(); }

  bool is_zero() const { return factors_.empty() || coefficient_ == 0.0; }
  int rank() const { return static_cast<int>(factors_.size()); }
  double coefficient() const { return coefficient_; }
  const std::vector<Eigen::VectorXd>& factors() const { return factors_; }

  /// coefficient * sum_j d_j (d_j . x). Counts one op per scalar
  /// multiply and add into `ops` when provided.
  Eigen::VectorXd apply(const Eigen::VectorXd& x, std::uint64_t* ops = nullptr) const;

  double trace() const;

  /// Dense form, for test oracles only.
  Eigen::MatrixXd dense(int dim) const;

 private:
  double coefficient_ = 0.0;
  std::vector<Eigen::VectorXd> factors_;
};

}  // namespace sgmcmc
