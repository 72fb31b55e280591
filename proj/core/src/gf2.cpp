#include "ura/gf2.hpp"

#include <bit>
#include <stdexcept>

namespace ura::gf2 {

std::vector<std::uint64_t> Matrix::left_mul(
    const std::vector<std::uint64_t>& vec_bits) const {
  std::vector<std::uint64_t> out(words_, 0);
  for (std::size_t r = 0; r < rows_; ++r) {
    if ((vec_bits[r / 64] >> (r % 64)) & 1) {
      for (std::size_t j = 0; j < words_; ++j) out[j] ^= data_[r * words_ + j];
    }
  }
  return out;
}

std::size_t Matrix::row_reduce() {
  std::size_t rank = 0;
  for (std::size_t c = 0; c < cols_ && rank < rows_; ++c) {
    std::size_t pivot = rows_;
    for (std::size_t r = rank; r < rows_; ++r) {
      if (get(r, c)) { pivot = r; break; }
    }
    if (pivot == rows_) continue;
    if (pivot != rank) {
      for (std::size_t j = 0; j < words_; ++j)
        std::swap(data_[pivot * words_ + j], data_[rank * words_ + j]);
    }
    for (std::size_t r = 0; r < rows_; ++r) {
      if (r != rank && get(r, c)) xor_row(r, rank);
    }
    ++rank;
  }
  return rank;
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c)
      if (get(r, c)) t.set(c, r, true);
  return t;
}

Matrix Matrix::select_columns(const std::vector<std::size_t>& idx) const {
  Matrix s(rows_, idx.size());
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t j = 0; j < idx.size(); ++j)
      if (get(r, idx[j])) s.set(r, j, true);
  return s;
}

std::vector<std::uint64_t> encode(const BinaryCode& code, std::uint64_t message) {
  std::vector<std::uint64_t> m{message};
  return code.G.left_mul(m);
}

std::size_t weight(const std::vector<std::uint64_t>& bits) {
  std::size_t w = 0;
  for (auto x : bits) w += static_cast<std::size_t>(std::popcount(x));
  return w;
}

BinaryCode code_from_rows(std::size_t n, const std::vector<std::uint64_t>& rows) {
  if (n > 64) throw std::invalid_argument("code_from_rows: n <= 64 required");
  BinaryCode code;
  code.n = n;
  code.k = rows.size();
  code.G = Matrix(rows.size(), n);
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < n; ++c)
      if ((rows[r] >> c) & 1) code.G.set(r, c, true);
  if (code.G.rank() != code.k) {
    throw std::invalid_argument("code_from_rows: generator not full rank");
  }
  code.H = parity_check_from_generator(code.G);
  return code;
}

Matrix parity_check_from_generator(const Matrix& G) {
  const std::size_t k = G.rows(), n = G.cols();
  // Reduce G to RREF, note pivot columns, then read off the null space of
  // the row space (i.e. the dual code generator).
  Matrix R = G;
  R.row_reduce();
  std::vector<std::size_t> pivot_col;
  std::vector<bool> is_pivot(n, false);
  std::size_t r = 0;
  for (std::size_t c = 0; c < n && r < k; ++c) {
    if (R.get(r, c)) {
      bool clean = true;
      for (std::size_t rr = 0; rr < k; ++rr) {
        if (rr != r && R.get(rr, c)) { clean = false; break; }
      }
      if (clean) {
        pivot_col.push_back(c);
        is_pivot[c] = true;
        ++r;
      }
    }
  }
  std::vector<std::size_t> free_col;
  for (std::size_t c = 0; c < n; ++c)
    if (!is_pivot[c]) free_col.push_back(c);

  Matrix H(free_col.size(), n);
  for (std::size_t i = 0; i < free_col.size(); ++i) {
    std::size_t fc = free_col[i];
    H.set(i, fc, true);
    for (std::size_t p = 0; p < pivot_col.size(); ++p) {
      if (R.get(p, fc)) H.set(i, pivot_col[p], true);
    }
  }
  return H;
}

bool solve(const Matrix& A, const std::vector<std::uint64_t>& b,
           LinearSystemSolution& out) {
  const std::size_t m = A.rows(), n = A.cols();
  // Augmented elimination.
  Matrix aug(m, n + 1);
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t c = 0; c < n; ++c)
      if (A.get(r, c)) aug.set(r, c, true);
    if ((b[r / 64] >> (r % 64)) & 1) aug.set(r, n, true);
  }
  std::vector<std::size_t> pivot_of_row;
  std::size_t rank = 0;
  for (std::size_t c = 0; c < n && rank < m; ++c) {
    std::size_t pr = m;
    for (std::size_t r = rank; r < m; ++r)
      if (aug.get(r, c)) { pr = r; break; }
    if (pr == m) continue;
    if (pr != rank) {
      for (std::size_t cc = 0; cc <= n; ++cc) {
        bool t = aug.get(pr, cc);
        aug.set(pr, cc, aug.get(rank, cc));
        aug.set(rank, cc, t);
      }
    }
    for (std::size_t r = 0; r < m; ++r)
      if (r != rank && aug.get(r, c)) aug.xor_row(r, rank);
    pivot_of_row.push_back(c);
    ++rank;
  }
  for (std::size_t r = rank; r < m; ++r) {
    if (aug.get(r, n)) return false;  // inconsistent
  }
  const std::size_t words = (n + 63) / 64;
  out.particular.assign(words, 0);
  std::vector<bool> is_pivot(n, false);
  for (std::size_t r = 0; r < rank; ++r) {
    is_pivot[pivot_of_row[r]] = true;
    if (aug.get(r, n)) {
      std::size_t c = pivot_of_row[r];
      out.particular[c / 64] |= std::uint64_t{1} << (c % 64);
    }
  }
  out.null_basis.clear();
  for (std::size_t fc = 0; fc < n; ++fc) {
    if (is_pivot[fc]) continue;
    std::vector<std::uint64_t> v(words, 0);
    v[fc / 64] |= std::uint64_t{1} << (fc % 64);
    for (std::size_t r = 0; r < rank; ++r) {
      if (aug.get(r, fc)) {
        std::size_t c = pivot_of_row[r];
        v[c / 64] |= std::uint64_t{1} << (c % 64);
      }
    }
    out.null_basis.push_back(std::move(v));
  }
  return true;
}

BinaryCode bch_63_10_27() {
  // g(x) = 0x2759262d5d506d, degree 53 (cyclic, non-systematic rows x^i g(x)).
  const std::uint64_t g = 0x2759262d5d506dULL;
  std::vector<std::uint64_t> rows;
  for (int i = 0; i < 10; ++i) rows.push_back(g << i);
  return code_from_rows(63, rows);
}

BinaryCode bch_15_7_5() {
  const std::uint64_t g = 0b111010001ULL;  // x^8+x^7+x^6+x^4+1
  std::vector<std::uint64_t> rows;
  for (int i = 0; i < 7; ++i) rows.push_back(g << i);
  return code_from_rows(15, rows);
}

BinaryCode hamming_7_4() {
  const std::uint64_t g = 0b1011ULL;  // x^3 + x + 1
  std::vector<std::uint64_t> rows;
  for (int i = 0; i < 4; ++i) rows.push_back(g << i);
  return code_from_rows(7, rows);
}

}  // namespace ura::gf2
