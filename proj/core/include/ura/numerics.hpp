#ifndef URA_NUMERICS_HPP
#define URA_NUMERICS_HPP

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace ura::num {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kLn2 = 0.6931471805599453094172321214581766;

/// Natural-log-domain probability.  value <= 0 when it represents a genuine
/// probability; intermediate bound terms may sit above 0 before clamping.
struct LogProb {
  double value = kNegInf;
  LogProb() = default;
  explicit LogProb(double v) : value(v) {}
  static LogProb from_linear(double p) {
    return LogProb(p > 0 ? std::log(p) : kNegInf);
  }
  double linear() const { return std::exp(value); }
  /// Clamp at log(1) for reporting.
  LogProb clamped() const { return LogProb(value > 0.0 ? 0.0 : value); }
};

/// log(e^a + e^b), safe against -inf and overflow.
inline double log_sum_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  double m = a > b ? a : b;
  return m + std::log1p(std::exp(-(a > b ? a - b : b - a)));
}

/// log sum of exponentials over a range; permutation-invariant to 1 ulp
/// (single max shift, left-to-right accumulation of equal-scaled terms).
double log_sum_exp(std::span<const double> xs);

/// log(e^a - e^b) for a >= b.
inline double log_diff_exp(double a, double b) {
  if (b == kNegInf) return a;
  if (a <= b) return kNegInf;
  return a + std::log1p(-std::exp(b - a));
}

/// Upper Gaussian tail Q(x) = P[N(0,1) > x].
double q_function(double x);

/// log Q(x), stable for large positive x (continued-fraction tail).
double log_q_function(double x);

/// Inverse of q_function on (0,1).  Throws std::domain_error outside.
double q_inverse(double p);

/// Solves Q(x) = exp(log_p) for very small tail masses (log_p <= ~-1).
double q_inverse_from_log(double log_p);

/// ln C(n, k) via lgamma.  Throws std::domain_error if k > n or k < 0.
double log_binomial(double n, double k);

/// ln C(2^bits - c, t) without materializing 2^bits.
/// Exact decomposition: sum_{i=0}^{t-1} ln(2^bits - c - i) - ln t!.
double log_binomial_pow2(double bits, double c, std::int64_t t);

/// Binary entropy; base 2 or e.  h(0) = h(1) = 0 exactly.
double binary_entropy(double p, double base = 2.0);

/// Natural-log entropy of Bernoulli(p); convenience for exponent algebra.
inline double entropy_nat(double p) { return binary_entropy(p, M_E); }

/// Regularized upper incomplete gamma Q(a, x) in log domain.
/// log Pr[chi2_n > y] = log_gamma_q(n/2, y/2).
double log_gamma_q(double a, double x);

/// Regularized lower incomplete gamma P(a, x) in log domain.
double log_gamma_p(double a, double x);

/// log Pr[chi2_nu > y].
inline double log_chi2_tail(double nu, double y) {
  return log_gamma_q(0.5 * nu, 0.5 * y);
}

/// E exp[eta' A eta + b' eta] for eta ~ N(0, I) in log domain:
///   -1/2 ln det(I - 2A) + 1/2 b'(I - 2A)^{-1} b.
/// Empty when I - 2A is not positive definite (Cholesky pivot tolerance
/// 1e-12); callers treat that as an infeasible Chernoff point.
std::optional<double> gauss_quadform_mgf(const Eigen::MatrixXd& A,
                                         const Eigen::VectorXd& b);

std::optional<double> gauss_quadform_mgf(const Eigen::MatrixXd& A);

}  // namespace ura::num

#endif  // URA_NUMERICS_HPP
