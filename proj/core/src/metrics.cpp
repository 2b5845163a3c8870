#include "sgmcmc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>

namespace sgmcmc::metrics {

GaussianLaw::GaussianLaw(Eigen::VectorXd mean_in, Eigen::MatrixXd covariance_in)
    : mean(std::move(mean_in)), covariance(std::move(covariance_in)) {
  if (covariance.rows() != covariance.cols() || covariance.rows() != mean.size())
    throw std::invalid_argument("GaussianLaw: shape mismatch");
  if ((covariance - covariance.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw std::invalid_argument("GaussianLaw: covariance not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(covariance);
  if (es.eigenvalues().minCoeff() < -1e-12)
    throw std::invalid_argument("GaussianLaw: covariance not PSD");
}

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  if (es.eigenvalues().minCoeff() < -1e-10)
    throw std::domain_error("psd_sqrt: matrix is not PSD");
  Eigen::VectorXd clipped = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().transpose();
}

double gaussian_kl(const GaussianLaw& p, const GaussianLaw& q) {
  const int d = p.dim();
  if (q.dim() != d) throw std::invalid_argument("gaussian_kl: dimension mismatch");
  Eigen::LDLT<Eigen::MatrixXd> ldlt(q.covariance);
  Eigen::VectorXd dq = ldlt.vectorD();
  if (ldlt.info() != Eigen::Success || dq.minCoeff() <= 0.0)
    throw std::domain_error("gaussian_kl: q covariance is singular");

  double trace_term = ldlt.solve(p.covariance).trace();
  Eigen::VectorXd dm = q.mean - p.mean;
  double quad = dm.dot(ldlt.solve(dm));

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esp(p.covariance);
  double logdet_p = 0.0;
  for (int i = 0; i < d; ++i) {
    double ev = std::max(esp.eigenvalues()[i], 0.0);
    if (ev <= 0.0) return std::numeric_limits<double>::infinity();
    logdet_p += std::log(ev);
  }
  double logdet_q = dq.array().log().sum();
  double kl = 0.5 * (trace_term + quad - d + logdet_q - logdet_p);
  return std::max(kl, 0.0);
}

double gaussian_chi_square(const Eigen::VectorXd& mu1, const Eigen::VectorXd& mu2,
                           double sigma2) {
  if (!(sigma2 > 0.0)) throw std::invalid_argument("gaussian_chi_square: sigma2 <= 0");
  return std::expm1((mu1 - mu2).squaredNorm() / sigma2);
}

double gaussian_w2(const GaussianLaw& p, const GaussianLaw& q) {
  Eigen::MatrixXd sq = psd_sqrt(q.covariance);
  Eigen::MatrixXd inner = sq * p.covariance * sq;
  inner = 0.5 * (inner + inner.transpose());  // symmetrize roundoff
  double cross = psd_sqrt(inner).trace();
  double w2sq = (p.mean - q.mean).squaredNorm() + p.covariance.trace() +
                q.covariance.trace() - 2.0 * cross;
  return std::sqrt(std::max(w2sq, 0.0));
}

double covariance_mismatch_w2sq(const Eigen::MatrixXd& sigma) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma);
  if (es.eigenvalues().minCoeff() < -1e-10)
    throw std::domain_error("covariance_mismatch_w2sq: Sigma is not PSD");
  double value = 0.0;
  double trace = 0.0;
  for (int i = 0; i < sigma.rows(); ++i) {
    double lam = std::max(es.eigenvalues()[i], 0.0);
    value += 2.0 + lam - 2.0 * std::sqrt(1.0 + lam);
    trace += lam;
  }
  if (value > 0.25 * trace * trace * (1.0 + 1e-12) + 1e-300)
    throw std::logic_error("covariance_mismatch_w2sq: proof inequality violated");
  return value;
}

double w2_1d_exact(std::vector<double> samples_a, std::vector<double> samples_b) {
  if (samples_a.size() != samples_b.size())
    throw std::invalid_argument("w2_1d_exact: length mismatch");
  if (samples_a.empty()) throw std::invalid_argument("w2_1d_exact: empty samples");
  std::sort(samples_a.begin(), samples_a.end());
  std::sort(samples_b.begin(), samples_b.end());
  double s = 0.0;
  for (std::size_t i = 0; i < samples_a.size(); ++i) {
    double diff = samples_a[i] - samples_b[i];
    s += diff * diff;
  }
  return std::sqrt(s / static_cast<double>(samples_a.size()));
}

double kl_quadrature_1d(const std::function<double(double)>& density_p,
                        const std::function<double(double)>& density_q,
                        const QuadratureGrid& grid) {
  if (grid.points < 3 || grid.points % 2 == 0)
    throw std::invalid_argument("kl_quadrature_1d: need an odd number of points >= 3");
  if (!(grid.hi > grid.lo)) throw std::invalid_argument("kl_quadrature_1d: bad range");
  const double h = (grid.hi - grid.lo) / (grid.points - 1);
  double sum = 0.0;
  for (int i = 0; i < grid.points; ++i) {
    double x = grid.lo + h * i;
    double p = density_p(x);
    double q = density_q(x);
    if (!(p > 0.0) || !(q > 0.0))
      throw std::domain_error("kl_quadrature_1d: nonpositive density on grid");
    double f = p * (std::log(p) - std::log(q));
    double w = (i == 0 || i == grid.points - 1) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    sum += w * f;
  }
  return sum * h / 3.0;
}

namespace {

// Minimal kd-tree for small-dimensional k-NN queries.
class KdTree {
 public:
  explicit KdTree(const std::vector<Eigen::VectorXd>& pts) : pts_(pts) {
    order_.resize(pts.size());
    std::iota(order_.begin(), order_.end(), 0);
    if (!pts.empty()) build(0, static_cast<long>(pts.size()), 0);
  }

  // Distance to the k-th nearest neighbor, optionally skipping one index.
  double kth_distance(const Eigen::VectorXd& query, int k, long skip = -1) const {
    std::vector<double> best;  // max-heap of squared distances, size <= k
    best.reserve(k + 1);
    search(0, static_cast<long>(pts_.size()), 0, query, k, skip, best);
    return std::sqrt(best.front());
  }

 private:
  void build(long lo, long hi, int axis) {
    if (hi - lo <= 1) return;
    long mid = (lo + hi) / 2;
    std::nth_element(order_.begin() + lo, order_.begin() + mid, order_.begin() + hi,
                     [&](long a, long b) { return pts_[a][axis] < pts_[b][axis]; });
    int next = (axis + 1) % pts_[0].size();
    build(lo, mid, next);
    build(mid + 1, hi, next);
  }

  void search(long lo, long hi, int axis, const Eigen::VectorXd& q, int k,
              long skip, std::vector<double>& best) const {
    if (hi <= lo) return;
    long mid = (lo + hi) / 2;
    long idx = order_[mid];
    if (idx != skip) {
      double d2 = (pts_[idx] - q).squaredNorm();
      if (static_cast<int>(best.size()) < k) {
        best.push_back(d2);
        std::push_heap(best.begin(), best.end());
      } else if (d2 < best.front()) {
        std::pop_heap(best.begin(), best.end());
        best.back() = d2;
        std::push_heap(best.begin(), best.end());
      }
    }
    if (hi - lo == 1) return;
    double delta = q[axis] - pts_[idx][axis];
    int next = (axis + 1) % q.size();
    long near_lo = delta < 0.0 ? lo : mid + 1;
    long near_hi = delta < 0.0 ? mid : hi;
    long far_lo = delta < 0.0 ? mid + 1 : lo;
    long far_hi = delta < 0.0 ? hi : mid;
    search(near_lo, near_hi, next, q, k, skip, best);
    if (static_cast<int>(best.size()) < k || delta * delta < best.front())
      search(far_lo, far_hi, next, q, k, skip, best);
  }

  const std::vector<Eigen::VectorXd>& pts_;
  std::vector<long> order_;
};

}  // namespace

double knn_kl_estimate(const std::vector<Eigen::VectorXd>& samples_p,
                       const std::vector<Eigen::VectorXd>& samples_q, int k) {
  const long n = static_cast<long>(samples_p.size());
  const long m = static_cast<long>(samples_q.size());
  if (k < 1) throw std::invalid_argument("knn_kl_estimate: k must be >= 1");
  if (n < k + 1 || m < k + 1)
    throw std::invalid_argument("knn_kl_estimate: need at least k+1 samples");
  const int d = static_cast<int>(samples_p[0].size());

  KdTree tree_p(samples_p);
  KdTree tree_q(samples_q);
  const double floor_dist = 1e-12;
  double acc = 0.0;
  for (long i = 0; i < n; ++i) {
    double rho = std::max(tree_p.kth_distance(samples_p[i], k, i), floor_dist);
    double nu = std::max(tree_q.kth_distance(samples_p[i], k, -1), floor_dist);
    acc += std::log(nu / rho);
  }
  return static_cast<double>(d) / n * acc +
         std::log(static_cast<double>(m) / static_cast<double>(n - 1));
}

}  // namespace sgmcmc::metrics
