#ifndef URA_IRSA_HPP
#define URA_IRSA_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ura/rng.hpp"

namespace ura::irsa {

/// User-node degree distribution Lambda(x) = sum_i Lambda_i x^i together
/// with the induced edge perspective lambda(x) = Lambda'(x)/Lambda'(1).
struct DegreeDistribution {
  std::vector<double> node_coeffs;  // node_coeffs[i] = Lambda_{i+1}

  double mean_degree() const;                 // Lambda'(1)
  double node_eval(double x) const;           // Lambda(x)
  double edge_eval(double x) const;           // lambda(x)
  std::vector<double> edge_coeffs() const;    // lambda_i, aligned with node_coeffs
  int max_degree() const;
  void validate() const;

  static DegreeDistribution single_degree(int d);
  /// Inverse of the node->edge map; requires the matching mean degree.
  static DegreeDistribution from_edge(const std::vector<double>& edge,
                                      double mean_degree);
};

/// Bipartite user/slot incidence for one frame.
struct IrsaFrame {
  int L = 0;
  std::vector<std::vector<int>> user_slots;  // per user, sorted slot ids
  std::vector<std::vector<int>> slot_users;

  std::vector<int> collision_orders() const;
};

/// Degrees i.i.d. from Lambda, slot subsets uniform over C(L, d).
IrsaFrame sample_frame(const DegreeDistribution& dd, int ka, int L,
                       RngStream& rng);

/// Per-collision-order slot failure probabilities p~(r), r = 1..T, plus the
/// alpha de-randomization schedule they were divided by.
struct SlotErrorModel {
  int T = 1;
  std::vector<double> p_tilde;  // p_tilde[r-1] = p~(r), monotone in r
  std::vector<double> alpha;

  double failure(int r) const { return p_tilde.at(r - 1); }
};

SlotErrorModel perfect_slot_model(int T);

/// Exponent E(t, t_hat) of the blind slot decoder bound; exposed for the
/// identity check against the frame-level rho-trick bound.
double blind_exponent(int n_prime, int k_bits, double power, int r, int t,
                      int t_hat, std::size_t budget = 1200);

/// Random-coding bound for blind slot decoding up to collision order T,
/// averaged over the Gaussian ensemble and de-randomized by the alpha
/// schedule (alpha_r = (1 - 1e-3)/T unless overridden).
SlotErrorModel slot_blind_bound(int n_prime, int k_bits, double power, int T,
                                std::span<const double> alpha = {},
                                std::size_t budget = 1200);

enum class SlotOracle { ideal, stochastic };

struct PeelResult {
  std::vector<bool> resolved;
  std::vector<int> resolve_round;  // -1 when unresolved
  int rounds = 0;

  std::size_t resolved_count() const;
};

/// Iterative slot decoding with interference cancellation.
///
/// ideal: greedy peeling; each step decodes the lowest-indexed slot whose
/// residual collision order is <= T, removes its users everywhere, and
/// repeats to the fixpoint.  rounds counts decoded slots.
///
/// stochastic: `iters` synchronized message-passing rounds; a slot edge
/// delivers when the other incoming erasure count t satisfies t+1 <= T and
/// a fresh Bernoulli(1 - p~(t+1)) attempt succeeds.  This is the finite
/// graph analog of the density-evolution recursion, so its PUPE converges
/// to the DE value on large frames.
PeelResult peel_decode(const IrsaFrame& frame, int T, SlotOracle oracle,
                       const SlotErrorModel& model, RngStream& rng,
                       int iters = 10);

struct DeResult {
  std::vector<double> edge_erasure;  // x_1..x_{l-1} trajectory
  double final_pupe = 1.0;           // x_l = Lambda(y_l)
};

/// Density evolution with Poissonized slot degrees (gamma = G Lambda'(1)).
DeResult density_evolution(const DegreeDistribution& dd, double G,
                           const SlotErrorModel& model, int T, int iters);

struct OptimizedDistribution {
  DegreeDistribution dd;
  int n_prime = 0;
  double power = 0.0;
  double ebno_db = 0.0;
  double de_pupe = 1.0;
};

/// Joint search over the coefficient simplex (degrees <= 4), the slot
/// length n' (divisors of frame_n), and the power, minimizing
/// Eb/N0 = n' P Lambda'(1) / (2k) subject to the DE PUPE after `iters`
/// iterations staying below eps.
OptimizedDistribution optimize_distribution(int ka, int k_bits, int T,
                                            int iters, double eps,
                                            int frame_n = 30000,
                                            int threads = 2);

/// p_e = 1 - sum_{r=1}^{T} (1-p_r) C(K_a-1, r-1) L^{-(r-1)} (1-1/L)^{K_a-r},
/// the slotted-ALOHA frame PUPE from a per-order slot PUPE table.
double slot_to_frame_pupe(std::span<const double> per_slot_pupe, int ka, int L,
                          int T);

}  // namespace ura::irsa

#endif  // URA_IRSA_HPP
