#ifndef URA_GMAC_BOUNDS_HPP
#define URA_GMAC_BOUNDS_HPP

#include <map>
#include <string>
#include <vector>

#include "ura/channels.hpp"
#include "ura/numerics.hpp"

namespace ura::bounds {

enum class GmacMethod {
  rho_trick,          // Gallager exponentiation, closed-form Chernoff lambda
  fano_gaussian,      // good-region split, 3x3 / 2x2 quadratic-form MGFs
  fano_binary,        // BPSK ensemble variant, p0 = 0
  combined_fixed,     // Fano + Gallager, alpha pinned to t/K_a
  combined_opt,       // Fano + Gallager, alpha optimized
};

std::string method_name(GmacMethod m);

struct PerTTerm {
  int t = 0;
  double log_pt = 0.0;             // natural log of the p_t bound (unclamped)
  bool interpolated = false;       // filled from the log-log t-grid
  std::vector<double> argmin;      // optimizer point for this t
};

/// One evaluated point of an achievability bound: the minimal Eb/N0, the
/// per-t error terms at the reported power, and the optimizer state.
struct BoundPoint {
  ch::SystemParams params;         // power = reported optimum
  double ebno_db = 0.0;
  double log_pupe = num::kNegInf;  // assembled bound at the reported power
  double log_p0 = num::kNegInf;
  double p_prime_ratio = 1.0;
  int t_star = 0;                  // dominant t in the assembly
  std::vector<PerTTerm> per_t;
  std::string method;
};

struct EvalOptions {
  std::size_t budget_first = 1600;   // optimizer evals for a cold t
  std::size_t budget_warm = 320;     // evals when warm-started
  double tol_db = 0.01;
  double bracket_lo_db = -3.0;
  double bracket_hi_db = 40.0;
  std::vector<double> p_prime_ratios = {0.90, 0.91, 0.92, 0.93, 0.94,
                                        0.95, 0.96, 0.97, 0.98, 0.99};
};

/// ln of the p0 bound: message collisions plus Gaussian power overshoot,
/// C(K_a,2)/M + K_a Pr[chi2_n/n > P/P'].
double p0_log(const ch::SystemParams& p, double p_prime);

/// Per-method PUPE evaluator with warm-started per-t optimizer state.
/// Power varies across calls; everything else is fixed at construction.
class GmacBound {
 public:
  GmacBound(GmacMethod m, const ch::SystemParams& base, double p_prime_ratio,
            const EvalOptions& opts = {});

  /// ln of the assembled PUPE bound sum_t (t/K_a) p_t + p0 at power P.
  double log_pupe(double power);

  const std::vector<PerTTerm>& last_per_t() const { return last_per_t_; }
  double last_p0() const { return last_p0_; }
  int last_t_star() const { return last_t_star_; }

  /// ln p_t for a single t (exposed for cross-module identity checks).
  double log_pt(double power, int t);

  GmacMethod method() const { return method_; }
  double p_prime_ratio() const { return ratio_; }

 private:
  double eval_t(double p_prime, int t, std::size_t budget,
                std::vector<double>* argmin_out);

  GmacMethod method_;
  ch::SystemParams base_;
  double ratio_;
  EvalOptions opts_;
  std::vector<int> t_grid_;
  std::map<int, std::vector<double>> warm_;
  std::vector<PerTTerm> last_per_t_;
  double last_p0_ = num::kNegInf;
  int last_t_star_ = 0;
};

/// Minimal Eb/N0 (dB) with PUPE <= eps; bisection with bracket expansion,
/// P' picked by the declared 1-D ratio search (skipped for the binary
/// method, which needs no power backoff).
BoundPoint min_ebno(GmacMethod m, const ch::SystemParams& params,
                    const EvalOptions& opts = {});

/// nP >= (Q^{-1}(l0/M) + Q^{-1}(eps))^2, reported as minimal Eb/N0 in dB.
/// Sets *vacuous (and returns -inf) when the right side is nonpositive.
double converse_single_user_db(const ch::SystemParams& p, double list_log2,
                               bool* vacuous = nullptr);

/// Fano converse: smallest P with
/// log2 M <= (1/(1-eps)) ((n/K_a) C(K_a P) + h(eps) + (1-eps) log2 l0).
double converse_multi_user_db(const ch::SystemParams& p, double list_log2);

// ---------------------------------------------------------------------------
// Asymptotics: K_a = mu n, n -> infinity, per-user payload k fixed.

struct AsymParams {
  double mu = 0.0;   // users per channel use
  int k = 100;       // bits per user
  double eps = 1e-3;

  double ptot_for_ebno_db(double db) const {
    return 2.0 * std::pow(10.0, db / 10.0) * mu * k;
  }
};

enum class AsymMethod { rho, fano, combined, gordon };

std::string method_name(AsymMethod m);

/// Max of the Fano and per-bit converses, in dB.
double asym_converse_db(const AsymParams& a);

/// Error exponent E_theta at a given total power; positive exponents for
/// every theta in [eps, 1] certify PUPE <= eps.
double asym_exponent(const AsymParams& a, AsymMethod m, double ptot,
                     double theta, std::size_t budget = 1200);

/// min over theta in [eps,1] of E_theta.
double asym_min_exponent(const AsymParams& a, AsymMethod m, double ptot,
                         std::size_t budget = 1200);

/// Smallest Eb/N0 (dB) with min_theta E_theta > 0.
double asym_achievability_db(const AsymParams& a, AsymMethod m,
                             double tol_db = 0.01);

}  // namespace ura::bounds

#endif  // URA_GMAC_BOUNDS_HPP
