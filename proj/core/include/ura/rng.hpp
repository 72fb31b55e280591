#ifndef URA_RNG_HPP
#define URA_RNG_HPP

#include <complex>
#include <cstdint>
#include <cmath>

namespace ura {

/// Counter-based PRNG: Philox4x32-10 (Salmon et al., SC'11).
///
/// The draw sequence is a pure function of (seed, stream_id, counter), so any
/// implementation of Philox4x32-10 in any language reproduces it.  Key layout:
///   key   = (lo32(seed), hi32(seed))
///   ctr   = (lo32(block), hi32(block), lo32(stream_id), hi32(stream_id))
/// Each block yields four 32-bit words, consumed in order.  Streams with
/// distinct stream_ids are independent; a stream must not be shared between
/// threads (allocate one per worker instead).
///
/// Derived draws are fixed as:
///   u64      : two consecutive 32-bit words, little-endian (first word = low)
///   double   : (u64 >> 11) * 2^-53, in [0, 1)
///   gaussian : Box-Muller on (1 - u1, u2); pairs cached, cache cleared never
class RngStream {
 public:
  RngStream() : RngStream(0, 0) {}
  RngStream(std::uint64_t seed, std::uint64_t stream_id)
      : key0_(static_cast<std::uint32_t>(seed)),
        key1_(static_cast<std::uint32_t>(seed >> 32)),
        stream_lo_(static_cast<std::uint32_t>(stream_id)),
        stream_hi_(static_cast<std::uint32_t>(stream_id >> 32)),
        seed_(seed), stream_id_(stream_id) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  std::uint32_t next_u32() {
    if (idx_ == 4) {
      run_block();
      idx_ = 0;
    }
    return out_[idx_++];
  }

  std::uint64_t next_u64() {
    std::uint64_t lo = next_u32();
    std::uint64_t hi = next_u32();
    return lo | (hi << 32);
  }

  /// Uniform double in [0, 1).
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform in [0, n). Unbiased via rejection.
  std::uint64_t next_below(std::uint64_t n) {
    if (n <= 1) return 0;
    const std::uint64_t lim = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x;
    do { x = next_u64(); } while (x >= lim);
    return x % n;
  }

  /// Standard normal via Box-Muller; one spare is cached per pair.
  double next_gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 1.0 - next_double();  // (0, 1]
    double u2 = next_double();
    double r = std::sqrt(-2.0 * std::log(u1));
    double c = std::cos(2.0 * M_PI * u2);
    double s = std::sin(2.0 * M_PI * u2);
    spare_ = r * s;
    have_spare_ = true;
    return r * c;
  }

  /// Circularly-symmetric complex normal CN(0,1): variance 1/2 per component.
  std::complex<double> next_cgaussian() {
    const double isq2 = 1.0 / std::sqrt(2.0);
    double re = next_gaussian() * isq2;
    double im = next_gaussian() * isq2;
    return {re, im};
  }

  /// Child stream for a parallel worker; deterministic in (this stream, tag).
  RngStream substream(std::uint64_t tag) const {
    return RngStream(seed_, stream_id_ * 0x9E3779B97F4A7C15ULL + tag + 1);
  }

 private:
  static std::uint32_t mulhi(std::uint32_t a, std::uint32_t b) {
    return static_cast<std::uint32_t>(
        (static_cast<std::uint64_t>(a) * b) >> 32);
  }
  static std::uint32_t mullo(std::uint32_t a, std::uint32_t b) {
    return a * b;
  }

  void run_block() {
    constexpr std::uint32_t kM0 = 0xD2511F53, kM1 = 0xCD9E8D57;
    constexpr std::uint32_t kW0 = 0x9E3779B9, kW1 = 0xBB67AE85;
    std::uint32_t c0 = static_cast<std::uint32_t>(block_);
    std::uint32_t c1 = static_cast<std::uint32_t>(block_ >> 32);
    std::uint32_t c2 = stream_lo_, c3 = stream_hi_;
    std::uint32_t k0 = key0_, k1 = key1_;
    for (int round = 0; round < 10; ++round) {
      std::uint32_t hi0 = mulhi(kM0, c0), lo0 = mullo(kM0, c0);
      std::uint32_t hi1 = mulhi(kM1, c2), lo1 = mullo(kM1, c2);
      std::uint32_t n0 = hi1 ^ c1 ^ k0;
      std::uint32_t n1 = lo1;
      std::uint32_t n2 = hi0 ^ c3 ^ k1;
      std::uint32_t n3 = lo0;
      c0 = n0; c1 = n1; c2 = n2; c3 = n3;
      k0 += kW0; k1 += kW1;
    }
    out_[0] = c0; out_[1] = c1; out_[2] = c2; out_[3] = c3;
    ++block_;
  }

  std::uint32_t key0_, key1_;
  std::uint32_t stream_lo_, stream_hi_;
  std::uint64_t seed_, stream_id_;
  std::uint64_t block_ = 0;
  std::uint32_t out_[4] = {0, 0, 0, 0};
  int idx_ = 4;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace ura

#endif  // URA_RNG_HPP
