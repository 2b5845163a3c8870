#pragma once

#include <functional>
#include <vector>

#include <Eigen/Core>

namespace sgmcmc::metrics {

/// Multivariate Gaussian; covariance must be symmetric (1e-12) with
/// eigenvalues >= -1e-12.
struct GaussianLaw {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;

  GaussianLaw(Eigen::VectorXd mean, Eigen::MatrixXd covariance);
  int dim() const { return static_cast<int>(mean.size()); }
};

/// Closed-form KL(p || q); q must be nonsingular.
double gaussian_kl(const GaussianLaw& p, const GaussianLaw& q);

/// Chi-square divergence between N(mu1, s2 I) and N(mu2, s2 I):
/// exp(||mu1 - mu2||^2 / s2) - 1.
double gaussian_chi_square(const Eigen::VectorXd& mu1, const Eigen::VectorXd& mu2,
                           double sigma2);

/// Bures 2-Wasserstein distance between Gaussians.
double gaussian_w2(const GaussianLaw& p, const GaussianLaw& q);

/// W2^2 between sqrt(I + Sigma) Z and Z: Tr(2I + Sigma - 2 sqrt(I + Sigma)).
/// Always <= Tr(Sigma)^2 / 4 for PSD Sigma.
double covariance_mismatch_w2sq(const Eigen::MatrixXd& sigma);

/// Exact 1-D W2 via order statistics on equal-length samples.
double w2_1d_exact(std::vector<double> samples_a, std::vector<double> samples_b);

struct QuadratureGrid {
  double lo = 0.0;
  double hi = 0.0;
  int points = 0;  // odd, >= 3
};

/// Simpson-rule estimate of the KL divergence between two 1-D densities.
double kl_quadrature_1d(const std::function<double(double)>& density_p,
                        const std::function<double(double)>& density_q,
                        const QuadratureGrid& grid);

/// k-nearest-neighbor KL estimate between two d-dimensional samples.
/// Distances are floored at 1e-12, so duplicated points only bias the value.
double knn_kl_estimate(const std::vector<Eigen::VectorXd>& samples_p,
                       const std::vector<Eigen::VectorXd>& samples_q, int k);

/// Symmetric PSD square root with eigenvalue clipping at zero (tol 1e-10).
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m);

}  // namespace sgmcmc::metrics
