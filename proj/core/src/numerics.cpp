#include "ura/numerics.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <stdexcept>

namespace ura::num {

double log_sum_exp(std::span<const double> xs) {
  double m = kNegInf;
  for (double x : xs) m = std::max(m, x);
  if (m == kNegInf) return kNegInf;
  if (std::isinf(m) && m > 0) return m;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

double q_function(double x) {
  return 0.5 * std::erfc(x / std::sqrt(2.0));
}

double log_q_function(double x) {
  if (x < 30.0) {
    double q = q_function(x);
    if (q > 0) return std::log(q);
  }
  // Continued fraction for Mills ratio: Q(x) = phi(x) / (x + 1/(x + 2/(x + ...)))
  double cf = 0.0;
  for (int k = 60; k >= 1; --k) cf = k / (x + cf);
  double denom = x + cf;
  return -0.5 * x * x - 0.5 * std::log(2.0 * M_PI) - std::log(denom);
}

namespace {

// Acklam's rational approximation to the standard normal quantile.
double norm_quantile_approx(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425, phigh = 1 - plow;
  double q, r;
  if (p < plow) {
    q = std::sqrt(-2 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  }
  if (p > phigh) {
    q = std::sqrt(-2 * std::log(1 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  }
  q = p - 0.5;
  r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
}

}  // namespace

double q_inverse(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("q_inverse: p must lie in (0,1)");
  }
  // Q(x) = p <=> Phi(-x) = p; refine with Newton on Q.
  double x = -norm_quantile_approx(p);
  for (int it = 0; it < 3; ++it) {
    double f = q_function(x) - p;
    double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
    if (pdf == 0.0) break;
    x += f / pdf;  // dQ/dx = -pdf
  }
  return x;
}

double q_inverse_from_log(double log_p) {
  if (log_p >= 0.0) throw std::domain_error("q_inverse_from_log: log_p >= 0");
  if (log_p > std::log(1e-290)) {
    double p = std::exp(log_p);
    if (p > 1e-300 && p < 1.0) {
      // Newton in log domain from the linear-domain start.
      double x = q_inverse(std::min(1.0 - 1e-16, p));
      for (int it = 0; it < 40; ++it) {
        double lq = log_q_function(x);
        double lpdf = -0.5 * x * x - 0.5 * std::log(2.0 * M_PI);
        double step = (lq - log_p) * std::exp(lq - lpdf);
        x += step;
        if (std::abs(step) < 1e-13 * std::max(1.0, std::abs(x))) break;
      }
      return x;
    }
  }
  // Extremely small tails: asymptotic start x ~ sqrt(-2 log_p), then Newton.
  double x = std::sqrt(std::max(0.0, -2.0 * log_p));
  for (int it = 0; it < 60; ++it) {
    double lq = log_q_function(x);
    double lpdf = -0.5 * x * x - 0.5 * std::log(2.0 * M_PI);
    double step = (lq - log_p) * std::exp(lq - lpdf);
    x += step;
    if (std::abs(step) < 1e-13 * std::max(1.0, std::abs(x))) break;
  }
  return x;
}

double log_binomial(double n, double k) {
  if (k < 0 || k > n) throw std::domain_error("log_binomial: need 0 <= k <= n");
  if (k == 0 || k == n) return 0.0;
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

double log_binomial_pow2(double bits, double c, std::int64_t t) {
  if (t < 0 || bits < 0) {
    throw std::domain_error("log_binomial_pow2: need t >= 0, bits >= 0");
  }
  if (t == 0) return 0.0;
  // ln(2^bits - c - i) = bits ln2 + log1p(-(c+i) 2^-bits); exact until
  // 2^bits is small enough to materialize, where we fall back to lgamma.
  if (bits <= 50) {
    double n = std::ldexp(1.0, static_cast<int>(bits)) - c;
    return log_binomial(n, static_cast<double>(t));
  }
  double s = 0.0;
  for (std::int64_t i = 0; i < t; ++i) {
    double frac = (c + static_cast<double>(i)) * std::exp2(-bits);
    s += bits * kLn2 + std::log1p(-frac);
  }
  return s - std::lgamma(static_cast<double>(t) + 1.0);
}

double binary_entropy(double p, double base) {
  if (p < 0.0 || p > 1.0) throw std::domain_error("binary_entropy: p in [0,1]");
  if (p == 0.0 || p == 1.0) return 0.0;
  double h = -p * std::log(p) - (1.0 - p) * std::log1p(-p);
  return h / std::log(base);
}

namespace {

// Series and continued-fraction evaluation of the regularized incomplete
// gamma functions in log domain (gser/gcf split at x < a+1).
double log_gamma_p_series(double a, double x) {
  // P(a,x) = e^{-x + a ln x - lnG(a)} * sum_{n>=0} x^n G(a)/G(a+1+n)
  double ap = a;
  double sum = 1.0 / a, del = sum;
  for (int n = 0; n < 10000; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * 1e-17) break;
  }
  return -x + a * std::log(x) - std::lgamma(a) + std::log(sum);
}

double log_gamma_q_cf(double a, double x) {
  // Q(a,x) = e^{-x + a ln x - lnG(a)} * CF (modified Lentz)
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    double an = -static_cast<double>(i) * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return -x + a * std::log(x) - std::lgamma(a) + std::log(h);
}

}  // namespace

double log_gamma_p(double a, double x) {
  if (x < 0 || a <= 0) throw std::domain_error("log_gamma_p: bad arguments");
  if (x == 0) return kNegInf;
  if (x < a + 1.0) return log_gamma_p_series(a, x);
  double lq = log_gamma_q_cf(a, x);
  if (lq >= 0.0) return kNegInf;
  return std::log1p(-std::exp(lq));
}

double log_gamma_q(double a, double x) {
  if (x < 0 || a <= 0) throw std::domain_error("log_gamma_q: bad arguments");
  if (x == 0) return 0.0;
  if (x >= a + 1.0) return log_gamma_q_cf(a, x);
  double lp = log_gamma_p_series(a, x);
  if (lp >= 0.0) return kNegInf;
  return std::log1p(-std::exp(lp));
}

std::optional<double> gauss_quadform_mgf(const Eigen::MatrixXd& A,
                                         const Eigen::VectorXd& b) {
  const Eigen::Index n = A.rows();
  Eigen::MatrixXd M = Eigen::MatrixXd::Identity(n, n) - 2.0 * A;
  Eigen::LLT<Eigen::MatrixXd> llt(M);
  if (llt.info() != Eigen::Success) return std::nullopt;
  Eigen::MatrixXd L = llt.matrixL();
  double logdet = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double pivot = L(i, i);
    if (!(pivot > 1e-12)) return std::nullopt;
    logdet += 2.0 * std::log(pivot);
  }
  double quad = 0.0;
  if (b.size() > 0 && b.squaredNorm() > 0) {
    Eigen::VectorXd y = llt.solve(b);
    quad = 0.5 * b.dot(y);
  }
  return -0.5 * logdet + quad;
}

std::optional<double> gauss_quadform_mgf(const Eigen::MatrixXd& A) {
  return gauss_quadform_mgf(A, Eigen::VectorXd());
}

}  // namespace ura::num
