#ifndef URA_FADING_HPP
#define URA_FADING_HPP

#include <Eigen/Dense>
#include <vector>

#include "ura/channels.hpp"
#include "ura/codebooks.hpp"
#include "ura/numerics.hpp"
#include "ura/rng.hpp"

namespace ura::fading {

/// Exact projection decoder: the K_a-subset whose span captures the most
/// received energy, argmax ||P_S y||^2.  Exhaustive over C(M, K_a)
/// subsets; throws std::length_error beyond subset_cap.  The greedy
/// variant is a heuristic, not the maximizer.
std::vector<std::uint32_t> projection_decode(const cb::Codebook& codebook,
                                             const Eigen::VectorXcd& y, int ka,
                                             bool greedy = false,
                                             std::uint64_t subset_cap = 1000000);

/// ln of the beta-tail bound
/// F_{1-beta}(x; n-K_a, t) <= C(n-K_a+t-1, t-1) x^{n-K_a}, clamped at ln 1.
double beta_tail_bound_log(double x, int n, int ka, int t);

struct SisoAchResult {
  double ebno_db = 0.0;
  double pupe = 0.0;          // assembled bound at the reported power
  double pupe_se = 0.0;       // Monte-Carlo standard error of the assembly
  bool sample_starved = false;
  std::vector<double> per_t;  // p_t bounds
  std::vector<double> delta;  // optimized delta per t
  int samples = 0;
};

struct SisoAchOptions {
  int samples = 400;
  double tol_db = 0.05;
  double p_prime_ratio = 0.95;
  double bracket_lo_db = 0.0;
  double bracket_hi_db = 30.0;
  std::uint64_t seed = 1;
  std::uint64_t stream = 900;
};

/// Monte-Carlo PUPE bound at a fixed power: per t, the projection ratio
/// G of the t-weakest-users split is sampled over (H, codebook, Z), and
/// p_t = inf_delta [ C(K_a,t) e^{-(n-K_a)delta} + Pr(G >= V_{n,t}) ].
SisoAchResult siso_pupe_at_power(const ch::SystemParams& params,
                                 const SisoAchOptions& opts);

/// Minimal Eb/N0 with the assembled bound below params.eps (common random
/// numbers across the bisection).
SisoAchResult siso_achievability(const ch::SystemParams& params,
                                 const SisoAchOptions& opts = {});

struct SisoConverseResult {
  double log2m_max = 0.0;
  double gamma_n = 0.0;
  double tail_estimate = 0.0;  // Pr[L_n >= n gamma_n]
  double tail_se = 0.0;
  bool sample_starved = false;
  int samples = 0;
};

struct SisoConverseOptions {
  int quantile_samples = 2000;
  int tail_samples = 600;
  double is_rate = 0.4;  // exponential tilt of the fading gain
  std::uint64_t seed = 1;
  std::uint64_t stream = 901;
};

/// Meta-converse for the quasi-static single-antenna MAC:
/// log2 M <= log2 K_a + log2 (1 / Pr[L_n >= n gamma_n]), gamma_n the
/// eps-quantile of S_n/n (empirical), the L_n tail by importance-weighted
/// Monte-Carlo over the fading gain with the conditional probability
/// evaluated in closed form (noncentral chi-square).
SisoConverseResult siso_converse(int n, double eps, int ka, double power,
                                 const SisoConverseOptions& opts = {});

/// log CDF of the noncentral chi-square with 2n degrees of freedom and
/// noncentrality lambda, evaluated at y (Poisson-mixture series).
double log_noncentral_chi2_cdf(double y, int n2, double lambda);

}  // namespace ura::fading

#endif  // URA_FADING_HPP
