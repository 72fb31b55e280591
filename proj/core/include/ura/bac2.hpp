#ifndef URA_BAC2_HPP
#define URA_BAC2_HPP

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "ura/gf2.hpp"
#include "ura/rng.hpp"

namespace ura::bac2 {

/// One received word of the two-user noiseless binary adder channel.
/// E = erasure positions (y_j = 1); outside E the codeword bits are pinned.
struct Bac2Instance {
  const gf2::BinaryCode* code = nullptr;
  std::vector<int> y;               // over {0,1,2}
  std::vector<std::size_t> erasures;

  static Bac2Instance from_received(const gf2::BinaryCode& code,
                                    std::span<const int> y);
};

using CodewordPair = std::pair<std::uint64_t, std::uint64_t>;  // packed bits, n <= 64

/// All unordered codeword pairs summing to y, via the erasure linear system
/// H_E x_E = H_{E^c} x_{E^c}: 2^{s-1} pairs where s = |E| - rank(H_E).
/// Every solution is paired with its complement on E.
std::vector<CodewordPair> bac2_decode(const Bac2Instance& inst);

enum class PupeMode { exact_small, monte_carlo };

struct PupeResult {
  double pe = 0.0;
  double se = 0.0;   // zero in exact mode
  std::uint64_t evaluated = 0;
};

/// PUPE under ML (erasure) decoding with uniform tie accounting:
/// P_e = 1 - E[2^{-(s-1)}].  Exact mode enumerates the second codeword with
/// the first pinned to zero (all-zero reduction); Monte-Carlo samples pairs.
PupeResult bac2_pupe(const gf2::BinaryCode& code, PupeMode mode,
                     int mc_trials = 10000, RngStream* rng = nullptr);

/// P_e >= max(0, (1 - n/(2k-2))/2); the symmetric-rate-1/2 converse.
double bac2_converse(int n, int k);

/// A codeword is minimal when its support covers no other nonzero
/// codeword's support; minimal codes have zero adder-channel PUPE.
bool is_minimal_codeword(const gf2::BinaryCode& code, std::uint64_t word);
bool is_minimal_code(const gf2::BinaryCode& code);

}  // namespace ura::bac2

#endif  // URA_BAC2_HPP
