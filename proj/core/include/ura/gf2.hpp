#ifndef URA_GF2_HPP
#define URA_GF2_HPP

#include <cstdint>
#include <vector>

namespace ura::gf2 {

/// Dense GF(2) matrix, rows packed into 64-bit words.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), words_((cols + 63) / 64),
        data_(rows * ((cols + 63) / 64), 0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  bool get(std::size_t r, std::size_t c) const {
    return (data_[r * words_ + c / 64] >> (c % 64)) & 1;
  }
  void set(std::size_t r, std::size_t c, bool v) {
    std::uint64_t& w = data_[r * words_ + c / 64];
    std::uint64_t m = std::uint64_t{1} << (c % 64);
    if (v) w |= m; else w &= ~m;
  }
  void xor_row(std::size_t dst, std::size_t src) {
    for (std::size_t j = 0; j < words_; ++j)
      data_[dst * words_ + j] ^= data_[src * words_ + j];
  }
  bool row_is_zero(std::size_t r) const {
    for (std::size_t j = 0; j < words_; ++j)
      if (data_[r * words_ + j]) return false;
    return true;
  }

  /// vec (length rows) * this, as packed words of length cols.
  std::vector<std::uint64_t> left_mul(const std::vector<std::uint64_t>& vec_bits) const;

  /// Gaussian elimination; returns rank. Destructive on a copy semantics:
  /// call on a value you own.
  std::size_t row_reduce();

  std::size_t rank() const {
    Matrix tmp = *this;
    return tmp.row_reduce();
  }

  Matrix transposed() const;

  /// Columns selected by idx, in order.
  Matrix select_columns(const std::vector<std::size_t>& idx) const;

 private:
  std::size_t rows_ = 0, cols_ = 0, words_ = 0;
  std::vector<std::uint64_t> data_;
};

/// Binary linear code given by a generator matrix (and optionally a parity
/// check).  G must have full row rank k; when H is present, G H^T = 0.
struct BinaryCode {
  std::size_t n = 0;
  std::size_t k = 0;
  Matrix G;  // k x n
  Matrix H;  // (n-k) x n, may be empty (rows() == 0)

  bool has_parity_check() const { return H.rows() > 0; }
};

/// Encode a k-bit message (bit i of `message` = info bit i) to packed n bits.
std::vector<std::uint64_t> encode(const BinaryCode& code, std::uint64_t message);

/// Hamming weight of packed bits.
std::size_t weight(const std::vector<std::uint64_t>& bits);

/// Code from generator rows given as bitmasks (n <= 64).
BinaryCode code_from_rows(std::size_t n, const std::vector<std::uint64_t>& rows);

/// Parity-check matrix computed from G by Gaussian elimination (any linear
/// code; column permutations handled internally).
Matrix parity_check_from_generator(const Matrix& G);

/// Solve A x = b over GF(2).  Returns a particular solution and a basis of
/// the null space (both packed, length = A.cols() bits), or nothing if the
/// system is inconsistent.
struct LinearSystemSolution {
  std::vector<std::uint64_t> particular;
  std::vector<std::vector<std::uint64_t>> null_basis;
};
bool solve(const Matrix& A, const std::vector<std::uint64_t>& b,
           LinearSystemSolution& out);

/// Built-in BCH constants (length 63, designed distance 27, k = 10).
/// Generator polynomial computed once from the cyclotomic cosets of GF(64)
/// with primitive polynomial x^6 + x + 1.
BinaryCode bch_63_10_27();

/// The length-15 double-error-correcting BCH code [15,7,5];
/// g(x) = x^8 + x^7 + x^6 + x^4 + 1.
BinaryCode bch_15_7_5();

/// Hamming [7,4] code.
BinaryCode hamming_7_4();

}  // namespace ura::gf2

#endif  // URA_GF2_HPP
