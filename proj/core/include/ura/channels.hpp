#ifndef URA_CHANNELS_HPP
#define URA_CHANNELS_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

#include "ura/codebooks.hpp"
#include "ura/rng.hpp"

namespace ura::ch {

enum class Field { real, complex };

/// The (n, k, K_a, eps, P) tuple every bound and simulator consumes.
/// Noise variance is pinned at 1 per real dimension; all SNR control flows
/// through P.  The real/complex factor-2 rule lives here and only here.
struct SystemParams {
  int n = 0;          // channel uses per frame
  int k = 0;          // payload bits, M = 2^k
  int ka = 1;         // active users
  double eps = 0.05;  // target PUPE
  double power = 0.0; // per-symbol power P
  Field field = Field::real;

  double ebno_db() const;
  /// P achieving a given Eb/N0 in dB under this (n, k, field).
  static double power_for_ebno_db(double db, int n, int k,
                                  Field field = Field::real);
  void validate() const;
};

/// One channel use of the frame-level model: the multiset of transmitted
/// messages, the channel output, and any channel state.
struct Transmission {
  std::vector<std::uint32_t> messages;  // multiset, |messages| = K_a
  Eigen::VectorXd y;                    // real output
  Eigen::VectorXcd yc;                  // complex output
  Eigen::VectorXcd fading;              // h_i for fading channels
};

/// y = sum_i cb.column(W_i) + noise_scale * z, unit noise variance per real
/// dimension (complex: unit total per complex dimension).
Transmission gmac_transmit(const cb::Codebook& codebook,
                           std::span<const std::uint32_t> messages,
                           RngStream& rng, double noise_scale = 1.0);

/// Quasi-static single-antenna Rayleigh: y = sum_i h_i x^{(i)} + z with
/// h_i i.i.d. CN(0,1), stored in .fading.
Transmission rayleigh_siso_transmit(const cb::Codebook& codebook,
                                    std::span<const std::uint32_t> messages,
                                    RngStream& rng, double noise_scale = 1.0);

/// Noiseless two-user binary adder: elementwise integer sum over {0,1,2}.
std::vector<int> two_user_bac_transmit(std::span<const int> c1,
                                       std::span<const int> c2);

/// Split a frame vector into L equal slots; concatenation reproduces y.
std::vector<Eigen::VectorXd> slotted_view(const Eigen::VectorXd& y, int L);
std::vector<Eigen::VectorXcd> slotted_view(const Eigen::VectorXcd& y, int L);

}  // namespace ura::ch

#endif  // URA_CHANNELS_HPP
