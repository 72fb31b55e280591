#ifndef URA_CS_DECODERS_HPP
#define URA_CS_DECODERS_HPP

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <vector>

namespace ura::cs {

/// Detected columns with their fitted amplitudes and the final residual.
template <typename Scalar>
struct SupportEstimateT {
  std::vector<int> indices;                          // distinct, detection order
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> weights;  // aligned with indices
  double residual_norm = 0.0;
};

using SupportEstimate = SupportEstimateT<double>;
using SupportEstimateC = SupportEstimateT<std::complex<double>>;

/// Orthogonal matching pursuit: per iteration pick the undetected column
/// most correlated with the residual, least-squares refit on the detected
/// set (minimum-norm solution when rank deficient), update the residual.
/// Argmax ties break toward the lowest column index.
SupportEstimate omp(const Eigen::MatrixXd& A, const Eigen::VectorXd& y, int t);
SupportEstimateC omp(const Eigen::MatrixXcd& A, const Eigen::VectorXcd& y, int t);

struct SolverReport {
  Eigen::VectorXd x;
  int iterations = 0;
  bool converged = false;
};

/// min ||y - A u||^2 s.t. u >= 0, by projected gradient with
/// Barzilai-Borwein steps.  KKT tolerance `tol` on the projected gradient.
SolverReport nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& y,
                  int max_iter = 5000, double tol = 1e-9);

/// min ||y - A u||^2 + lambda ||u||_1 by cyclic coordinate descent.
/// Convergence when no coordinate moves more than `tol` in one sweep.
SolverReport lasso(const Eigen::MatrixXd& A, const Eigen::VectorXd& y,
                   double lambda, int max_iter = 1000, double tol = 1e-10);

/// Per-coordinate AMP denoiser eta(v, state) and its mean derivative.
struct Denoiser {
  std::function<double(double, double)> eta;        // (v, tau) -> value
  std::function<double(double, double)> eta_prime;  // (v, tau) -> derivative
};

Denoiser soft_threshold_denoiser(double theta);
/// Posterior mean for a {0,1} spike prior with activity pi.
Denoiser bayes_binary_denoiser(double pi);

struct AmpState {
  std::vector<Eigen::VectorXd> estimates;  // per iteration
  std::vector<double> residual_norms;
  bool diverged = false;
};

/// The two-line AMP recursion with the (M/n) <eta'> Onsager term.  Columns
/// are normalized to unit norm internally; amplitudes are rescaled back at
/// the boundary.  Aborts (diverged=true) if the residual norm grows 10x
/// over its running minimum.
Eigen::VectorXd amp(const Eigen::MatrixXd& A, const Eigen::VectorXd& y,
                    int iters, const Denoiser& den, AmpState* state = nullptr);

struct LmmseResult {
  Eigen::VectorXd estimate;
  Eigen::MatrixXd error_cov;
};

/// x_hat = G A'(A G A' + I)^{-1} (y - A mu) + mu and the matching error
/// covariance.  Inversion by Cholesky with 1e-12 diagonal loading on
/// failure.
LmmseResult lmmse(const Eigen::MatrixXd& A, const Eigen::VectorXd& y,
                  const Eigen::VectorXd& prior_mean,
                  const Eigen::MatrixXd& prior_cov);

}  // namespace ura::cs

#endif  // URA_CS_DECODERS_HPP
