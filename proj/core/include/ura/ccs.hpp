#ifndef URA_CCS_HPP
#define URA_CCS_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "ura/codebooks.hpp"
#include "ura/rng.hpp"

namespace ura::ccs {

/// A-channel with per-element misses and false alarms.
struct OuterChannelParams {
  int Q = 2;
  int L = 1;
  int ka = 1;
  double p_m = 0.0;
  double p_f = 0.0;

  void validate() const;
};

/// Per-slot received sets (sorted, unique; multiplicities are lost).
struct ReceivedLists {
  std::vector<std::vector<std::uint32_t>> lists;
};

/// Union of transmitted symbols, each kept w.p. 1-p_m; every absent symbol
/// inserted w.p. p_f.  The channel acts independently per element.
ReceivedLists a_channel(const std::vector<std::vector<std::uint32_t>>& sent,
                        int Q, double p_m, double p_f, RngStream& rng);

/// t-tree outer code: block upper-triangular generator over GF(2),
/// c bits per symbol (Q = 2^c), bit allocation b_1..b_L summing to k.
struct TreeCode {
  int L = 0;
  int c = 0;
  std::vector<int> bits;  // b_l
  // contribution of global message bit i to the slot-l symbol (c-bit mask);
  // zero for l earlier than the bit's own block
  std::vector<std::vector<std::uint32_t>> bit_symbol;  // [k][L]

  int k() const;
  std::vector<int> prefix_bits() const;  // B_l
  int block_of_bit(int i) const;
};

/// Blocks G_{l',l} i.i.d. Bernoulli(1/2) (the random ensemble of the
/// path-count analysis).
TreeCode random_tree_code(const std::vector<int>& bits, int c, RngStream& rng);

/// G_{l,l} = I (systematic diagonal), zero off-diagonal blocks; requires
/// b_l <= c for every l.
TreeCode systematic_tree_code(const std::vector<int>& bits, int c);

std::vector<std::uint32_t> tree_encode(const TreeCode& tc, std::uint64_t message);

struct TreeDecodeResult {
  std::vector<std::uint64_t> messages;
  std::size_t max_live_paths = 0;
};

/// Sequential list decoding with erasure budget t; output is exactly
/// { u : d(Y, f_O(u)) <= t }.  Throws std::length_error with a diagnostic
/// when the live path count exceeds path_cap.
TreeDecodeResult tree_decode(const TreeCode& tc, const ReceivedLists& lists,
                             int t, std::size_t path_cap = std::size_t{1} << 16);

/// Expected decoding path counts E|V_l^{(c)}|, E|V_l^{(f)}| (natural logs)
/// for the random tree-code ensemble over the outer channel.
struct PathStats {
  std::vector<double> log_correct;  // per l
  std::vector<double> log_false;
};
PathStats tree_path_stats(const std::vector<int>& bits,
                          const OuterChannelParams& ochan, int t);

/// mu_r = (1 - ((Q-1)/Q)^r)(1 - p_m) + ((Q-1)/Q)^r p_f.
double mu_r(int Q, double p_m, double p_f, int r);

/// ln S(n, r) for r = 0..n (Stirling numbers of the second kind, by the
/// standard recurrence in log domain).
std::vector<double> log_stirling2_row(int n);

struct RcbResult {
  double log_pe = 0.0;  // ln of the P_e bound
  double log_pf = 0.0;  // ln of the P_f bound
};

/// Random-coding bound for the outer code, corollary form with the p'
/// collision term; M given as log2 (alphabet of messages, M = 2^{M_log2}).
RcbResult ccs_rcb(const OuterChannelParams& ochan, double M_log2, int t);

/// Exact theorem form of the false-alarm bound (nu_r sum over collision
/// profiles); P_e identical to the corollary form.
RcbResult ccs_rcb_exact(const OuterChannelParams& ochan, double M_log2, int t);

/// Achievable-rate estimate I_u (bits per slot symbol) built from the
/// printed entropy bounds.
double outer_capacity(const OuterChannelParams& ochan);

/// Exact I_u by enumeration; requires Q^{K_a} <= 2^20 and Q <= 20.
double outer_capacity_exact(const OuterChannelParams& ochan);

/// Fano converse for the outer channel: max log2 M.
double outer_converse(const OuterChannelParams& ochan, double eps,
                      double list_log2);

// --- Reed-Solomon list-recovery scheme --------------------------------------

enum class RsMode { naive, prefix_grouped };

struct RsParams {
  int q = 16;    // RS field size (power of two)
  int q_p = 1;   // number of prefix groups; Q = q_p * q
  int L = 5;     // code length, L < q
  int k_o = 2;   // RS dimension
  int b_c = 0;   // CRC bits, modeled as an ideal hash
  int m = 1;     // interpolation multiplicity in the recovery predicate
};

struct RsResult {
  double pupe = 0.0;
  double far = 0.0;
  double se_pupe = 0.0;
  int trials = 0;
};

/// Largest correctable erasure count under the all-points-multiplicity-m
/// recovery condition with per-position list size ka; negative means the
/// configuration cannot correct errors at all.
double rs_max_erasures(int L, int k_o, int ka, int m);

/// Monte-Carlo PUPE/FAR of the RS scheme over the outer channel
/// (p_m, p_f from ochan); list recovery realized as brute-force enumeration
/// of all q^{k_o} polynomials with the recovery predicate as the accept
/// check.  Throws std::domain_error in naive mode when no t >= 0 is
/// correctable.
RsResult rs_scheme(const OuterChannelParams& ochan, const RsParams& rs,
                   RsMode mode, int trials, RngStream& rng);

// --- end-to-end slot simulator ----------------------------------------------

enum class InnerChannel { gmac, rayleigh };

struct EndToEndResult {
  double pupe = 0.0;
  double far = 0.0;
  double slot_pm = 0.0;  // measured per-slot missed-detection rate
  double slot_pf = 0.0;
  double se_pupe = 0.0;
  int trials = 0;
};

/// Full CCS pipeline: outer encode, per-slot superposition through the
/// channel, inner CS decode to K0-symbol lists, tree decode.
EndToEndResult ccs_end_to_end(const cb::Codebook& inner, const TreeCode& outer,
                              InnerChannel chan, int ka, int K0, int t,
                              int trials, RngStream& rng,
                              double noise_scale = 1.0);

}  // namespace ura::ccs

#endif  // URA_CCS_HPP
