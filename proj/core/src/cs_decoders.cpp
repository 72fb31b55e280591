#include "ura/cs_decoders.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ura::cs {

namespace {

template <typename Scalar>
SupportEstimateT<Scalar> omp_impl(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& A,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& y, int t) {
  const Eigen::Index n = A.rows(), M = A.cols();
  if (t < 0 || t > std::min(n, M)) {
    throw std::invalid_argument("omp: need 0 <= t <= min(n, M)");
  }
  SupportEstimateT<Scalar> est;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> residual = y;
  std::vector<bool> used(M, false);
  for (int it = 0; it < t; ++it) {
    int best = -1;
    double best_corr = -1.0;
    for (Eigen::Index j = 0; j < M; ++j) {
      if (used[j]) continue;
      double c = std::abs(A.col(j).dot(residual));
      if (c > best_corr + 1e-15 * best_corr) {  // strict improve; ties keep lowest j
        best_corr = c;
        best = static_cast<int>(j);
      }
    }
    if (best < 0) break;
    used[best] = true;
    est.indices.push_back(best);
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> Ad(n, est.indices.size());
    for (std::size_t c = 0; c < est.indices.size(); ++c)
      Ad.col(c) = A.col(est.indices[c]);
    // minimum-norm least squares handles rank-deficient detected sets
    est.weights = Ad.completeOrthogonalDecomposition().solve(y);
    residual = y - Ad * est.weights;
  }
  est.residual_norm = residual.norm();
  return est;
}

}  // namespace

SupportEstimate omp(const Eigen::MatrixXd& A, const Eigen::VectorXd& y, int t) {
  return omp_impl<double>(A, y, t);
}
SupportEstimateC omp(const Eigen::MatrixXcd& A, const Eigen::VectorXcd& y, int t) {
  return omp_impl<std::complex<double>>(A, y, t);
}

SolverReport nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& y,
                  int max_iter, double tol) {
  const Eigen::Index M = A.cols();
  SolverReport rep;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(M);
  Eigen::VectorXd g = A.transpose() * (A * x - y);  // gradient of 1/2||.||^2 scale x2
  g *= 2.0;
  Eigen::VectorXd x_prev = x, g_prev = g;
  double step = 1.0 / std::max(1e-12, (A.transpose() * A).diagonal().maxCoeff() * 2.0);
  auto project = [](Eigen::VectorXd v) {
    return v.cwiseMax(0.0).eval();
  };
  for (rep.iterations = 0; rep.iterations < max_iter; ++rep.iterations) {
    // KKT: active coords gradient ~ 0; zero coords gradient >= -tol
    double kkt = 0.0;
    for (Eigen::Index j = 0; j < M; ++j) {
      if (x(j) > 0) kkt = std::max(kkt, std::abs(g(j)));
      else kkt = std::max(kkt, std::max(0.0, -g(j)));
    }
    if (kkt <= tol) {
      rep.converged = true;
      break;
    }
    Eigen::VectorXd x_new = project(x - step * g);
    Eigen::VectorXd g_new = 2.0 * (A.transpose() * (A * x_new - y));
    // Barzilai-Borwein step from the last pair
    Eigen::VectorXd dx = x_new - x, dg = g_new - g;
    double denom = dx.dot(dg);
    step = denom > 1e-300 ? dx.squaredNorm() / denom : step * 2.0;
    if (!(step > 0) || !std::isfinite(step)) step = 1e-3;
    x = std::move(x_new);
    g = std::move(g_new);
  }
  // projection keeps x >= 0; snap dust to exact zero
  for (Eigen::Index j = 0; j < M; ++j) {
    if (x(j) < 1e-14) x(j) = 0.0;
  }
  rep.x = std::move(x);
  return rep;
}

SolverReport lasso(const Eigen::MatrixXd& A, const Eigen::VectorXd& y,
                   double lambda, int max_iter, double tol) {
  if (lambda < 0) throw std::invalid_argument("lasso: lambda >= 0");
  const Eigen::Index M = A.cols();
  SolverReport rep;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(M);
  Eigen::VectorXd col_sq(M);
  for (Eigen::Index j = 0; j < M; ++j) col_sq(j) = A.col(j).squaredNorm();
  Eigen::VectorXd r = y;  // residual y - A x
  auto soft = [](double v, double s) {
    if (v > s) return v - s;
    if (v < -s) return v + s;
    return 0.0;
  };
  for (rep.iterations = 0; rep.iterations < max_iter; ++rep.iterations) {
    double max_move = 0.0;
    for (Eigen::Index j = 0; j < M; ++j) {
      if (col_sq(j) == 0.0) continue;
      double old = x(j);
      // minimize ||r + a_j old - a_j v||^2 + lambda |v| over v
      double rho = A.col(j).dot(r) + col_sq(j) * old;
      double v = soft(rho, lambda / 2.0) / col_sq(j);
      if (v != old) {
        r += A.col(j) * (old - v);
        x(j) = v;
        max_move = std::max(max_move, std::abs(v - old));
      }
    }
    if (max_move <= tol) {
      rep.converged = true;
      break;
    }
  }
  rep.x = std::move(x);
  return rep;
}

Denoiser soft_threshold_denoiser(double theta) {
  Denoiser d;
  d.eta = [theta](double v, double) {
    if (v > theta) return v - theta;
    if (v < -theta) return v + theta;
    return 0.0;
  };
  d.eta_prime = [theta](double v, double) {
    return std::abs(v) > theta ? 1.0 : 0.0;
  };
  return d;
}

Denoiser bayes_binary_denoiser(double pi) {
  Denoiser d;
  d.eta = [pi](double v, double tau) {
    double s2 = std::max(tau * tau, 1e-12);
    // posterior mean of u in {0,1}: pi N(v;1,s2) / (pi N(v;1,s2) + (1-pi) N(v;0,s2))
    double l1 = -(v - 1.0) * (v - 1.0) / (2 * s2) + std::log(pi);
    double l0 = -v * v / (2 * s2) + std::log1p(-pi);
    double m = std::max(l0, l1);
    double p1 = std::exp(l1 - m);
    return p1 / (p1 + std::exp(l0 - m));
  };
  d.eta_prime = [d, pi](double v, double tau) {
    double s2 = std::max(tau * tau, 1e-12);
    double p = d.eta(v, tau);
    return p * (1.0 - p) / s2;  // d/dv of the logistic posterior mean
  };
  return d;
}

Eigen::VectorXd amp(const Eigen::MatrixXd& A, const Eigen::VectorXd& y,
                    int iters, const Denoiser& den, AmpState* state) {
  const Eigen::Index n = A.rows(), M = A.cols();
  // internal unit-column normalization; amplitudes rescaled at the boundary
  Eigen::VectorXd scale(M);
  Eigen::MatrixXd An = A;
  for (Eigen::Index j = 0; j < M; ++j) {
    double s = A.col(j).norm();
    scale(j) = s > 0 ? s : 1.0;
    An.col(j) /= scale(j);
  }
  Eigen::VectorXd u = Eigen::VectorXd::Zero(M);
  Eigen::VectorXd resid = y;
  double min_resid = resid.norm();
  if (state) {
    state->estimates.clear();
    state->residual_norms.clear();
    state->diverged = false;
  }
  for (int t = 0; t < iters; ++t) {
    double tau = resid.norm() / std::sqrt(static_cast<double>(n));
    Eigen::VectorXd v = u + An.transpose() * resid;
    Eigen::VectorXd u_next(M);
    double dsum = 0.0;
    for (Eigen::Index j = 0; j < M; ++j) {
      u_next(j) = den.eta(v(j), tau);
      dsum += den.eta_prime(v(j), tau);
    }
    double onsager = (static_cast<double>(M) / n) * (dsum / M);
    resid = y - An * u_next + onsager * resid;
    u = std::move(u_next);
    double rn = resid.norm();
    if (state) {
      state->estimates.push_back(u.cwiseQuotient(scale));
      state->residual_norms.push_back(rn);
    }
    min_resid = std::min(min_resid, rn);
    if (rn > 10.0 * min_resid && rn > 1e-12) {
      if (state) state->diverged = true;
      break;
    }
  }
  return u.cwiseQuotient(scale);
}

LmmseResult lmmse(const Eigen::MatrixXd& A, const Eigen::VectorXd& y,
                  const Eigen::VectorXd& prior_mean,
                  const Eigen::MatrixXd& prior_cov) {
  const Eigen::Index n = A.rows();
  Eigen::MatrixXd S = A * prior_cov * A.transpose() +
                      Eigen::MatrixXd::Identity(n, n);
  Eigen::LLT<Eigen::MatrixXd> llt(S);
  if (llt.info() != Eigen::Success) {
    S.diagonal().array() += 1e-12;
    llt.compute(S);
  }
  Eigen::MatrixXd GAt = prior_cov * A.transpose();
  LmmseResult out;
  out.estimate = GAt * llt.solve(y - A * prior_mean) + prior_mean;
  out.error_cov = prior_cov - GAt * llt.solve(GAt.transpose());
  return out;
}

}  // namespace ura::cs
