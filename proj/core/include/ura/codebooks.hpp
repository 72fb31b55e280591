#ifndef URA_CODEBOOKS_HPP
#define URA_CODEBOOKS_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "ura/gf2.hpp"
#include "ura/rng.hpp"

namespace ura::cb {

enum class Ensemble {
  gaussian,
  spherical,
  binary_bpsk,
  bch_subcode,
  superimposed_parity,
  binary_chirp,
  explicit_cols,
};

std::string to_string(Ensemble e);
Ensemble ensemble_from_string(const std::string& s);

/// An n x M column dictionary.  Columns are codewords / sensing-matrix
/// atoms; finished codebooks are immutable and freely shared.
struct Codebook {
  Ensemble ensemble = Ensemble::explicit_cols;
  double power = 1.0;            // per-symbol power P
  std::uint64_t seed = 0;        // provenance
  std::uint64_t stream_id = 0;
  bool complex_field = false;
  Eigen::MatrixXd cols;          // real codebooks
  Eigen::MatrixXcd ccols;        // complex codebooks
  std::vector<std::uint32_t> power_violations;  // columns with ||a||^2 > nP

  Eigen::Index n() const { return complex_field ? ccols.rows() : cols.rows(); }
  Eigen::Index size() const { return complex_field ? ccols.cols() : cols.cols(); }
  Eigen::VectorXd column(Eigen::Index i) const { return cols.col(i); }
  Eigen::VectorXcd ccolumn(Eigen::Index i) const { return ccols.col(i); }
};

/// i.i.d. N(0,P) entries (CN(0,P) when complex). Columns whose energy
/// exceeds nP are flagged, never clipped; the p0 term of the bounds pays
/// for them.
Codebook make_gaussian(int n, int M, double P, RngStream& rng,
                       bool complex_field = false);

/// Columns uniform on the unit sphere (normalize-after-Gaussian).
Codebook make_spherical(int n, int M, RngStream& rng,
                        bool complex_field = false);

/// Columns uniform on the radius-sqrt(nP) shell; every codeword has equal
/// energy nP exactly.
Codebook make_power_shell(int n, int M, double P, RngStream& rng,
                          bool complex_field = false);

/// BPSK images tau(c) = (1-2c) sqrt(P) of all codewords of `code`.
/// With exclude_allones, drops a generator row so the all-one codeword
/// disappears, then re-verifies by weight enumeration (n <= 63 scale).
Codebook make_bch_subcode(const gf2::BinaryCode& code, bool exclude_allones,
                          double P = 1.0);

/// Superimposed codebook: BPSK images of the columns of the parity-check
/// matrix of a t-error-correcting code.  All sums of up to t distinct
/// columns are distinct.
Codebook make_superimposed(const gf2::Matrix& H, double P = 1.0);

/// Second-order binary chirps phi_{b,P}(x) = (-1)^{b'x + x'Px/2}, P symmetric
/// with zero diagonal.  Size 2^m x 2^{m + m(m-1)/2}.  Column index is
/// lexicographic over (b, upper triangle of P):
///   index = b + 2^m * pack(P),  pack row-major over pairs (i,j), i<j.
/// Throws std::length_error for m > 6.
Codebook make_binary_chirps(int m);

struct CoherenceReport {
  double min_value = 0.0;   // signed, normalized by column norms
  double max_value = 0.0;
  std::uint64_t pairs_checked = 0;
  bool exact = false;
};

/// Extrema of a_i'a_j / (|a_i||a_j|) over i < j.  Exhaustive for M <= 2^15,
/// a 10^6-pair sample above that.
CoherenceReport coherence(const Codebook& cb, RngStream* rng = nullptr);

/// Serialization: header line "URACB v1 <ensemble> n M P complex?" then
/// row-major little-endian float64 (complex entries interleaved re,im).
/// Round-trips bit-exactly.
void save(const Codebook& cb, const std::string& path);
Codebook load(const std::string& path);

}  // namespace ura::cb

#endif  // URA_CODEBOOKS_HPP
