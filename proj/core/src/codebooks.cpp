#include "ura/codebooks.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>

namespace ura::cb {

std::string to_string(Ensemble e) {
  switch (e) {
    case Ensemble::gaussian: return "gaussian";
    case Ensemble::spherical: return "spherical";
    case Ensemble::binary_bpsk: return "binary_bpsk";
    case Ensemble::bch_subcode: return "bch_subcode";
    case Ensemble::superimposed_parity: return "superimposed_parity";
    case Ensemble::binary_chirp: return "binary_chirp";
    case Ensemble::explicit_cols: return "explicit";
  }
  return "explicit";
}

Ensemble ensemble_from_string(const std::string& s) {
  if (s == "gaussian") return Ensemble::gaussian;
  if (s == "spherical") return Ensemble::spherical;
  if (s == "binary_bpsk") return Ensemble::binary_bpsk;
  if (s == "bch_subcode") return Ensemble::bch_subcode;
  if (s == "superimposed_parity") return Ensemble::superimposed_parity;
  if (s == "binary_chirp") return Ensemble::binary_chirp;
  if (s == "explicit") return Ensemble::explicit_cols;
  throw std::invalid_argument("unknown ensemble: " + s);
}

Codebook make_gaussian(int n, int M, double P, RngStream& rng,
                       bool complex_field) {
  if (n < 1 || M < 1 || !(P > 0)) {
    throw std::invalid_argument("make_gaussian: need n,M >= 1 and P > 0");
  }
  Codebook cb;
  cb.ensemble = Ensemble::gaussian;
  cb.power = P;
  cb.seed = rng.seed();
  cb.stream_id = rng.stream_id();
  cb.complex_field = complex_field;
  const double s = std::sqrt(P);
  const double cap = static_cast<double>(n) * P;
  if (!complex_field) {
    cb.cols.resize(n, M);
    for (int j = 0; j < M; ++j) {
      for (int i = 0; i < n; ++i) cb.cols(i, j) = s * rng.next_gaussian();
      if (cb.cols.col(j).squaredNorm() > cap)
        cb.power_violations.push_back(static_cast<std::uint32_t>(j));
    }
  } else {
    cb.ccols.resize(n, M);
    for (int j = 0; j < M; ++j) {
      for (int i = 0; i < n; ++i) cb.ccols(i, j) = s * rng.next_cgaussian();
      if (cb.ccols.col(j).squaredNorm() > cap)
        cb.power_violations.push_back(static_cast<std::uint32_t>(j));
    }
  }
  return cb;
}

Codebook make_spherical(int n, int M, RngStream& rng, bool complex_field) {
  if (n < 1 || M < 1) throw std::invalid_argument("make_spherical: n,M >= 1");
  Codebook cb;
  cb.ensemble = Ensemble::spherical;
  cb.power = 1.0 / n;  // ||a||^2 = 1 = nP
  cb.seed = rng.seed();
  cb.stream_id = rng.stream_id();
  cb.complex_field = complex_field;
  if (!complex_field) {
    cb.cols.resize(n, M);
    for (int j = 0; j < M; ++j) {
      for (int i = 0; i < n; ++i) cb.cols(i, j) = rng.next_gaussian();
      cb.cols.col(j).normalize();
    }
  } else {
    cb.ccols.resize(n, M);
    for (int j = 0; j < M; ++j) {
      for (int i = 0; i < n; ++i) cb.ccols(i, j) = rng.next_cgaussian();
      cb.ccols.col(j).normalize();
    }
  }
  return cb;
}

Codebook make_power_shell(int n, int M, double P, RngStream& rng,
                          bool complex_field) {
  Codebook cb = make_spherical(n, M, rng, complex_field);
  const double r = std::sqrt(static_cast<double>(n) * P);
  if (complex_field) cb.ccols *= r; else cb.cols *= r;
  cb.power = P;
  return cb;
}

namespace {

// Enumerate all 2^k codewords of a code with n <= 63 as packed words.
std::vector<std::uint64_t> enumerate_codewords(const gf2::BinaryCode& code) {
  std::vector<std::uint64_t> rows(code.k);
  for (std::size_t r = 0; r < code.k; ++r) {
    std::uint64_t w = 0;
    for (std::size_t c = 0; c < code.n; ++c)
      if (code.G.get(r, c)) w |= std::uint64_t{1} << c;
    rows[r] = w;
  }
  std::vector<std::uint64_t> cw(std::size_t{1} << code.k, 0);
  // Gray-code walk keeps this linear in output size.
  std::uint64_t cur = 0, prev_gray = 0;
  for (std::uint64_t m = 1; m < cw.size(); ++m) {
    std::uint64_t gray = m ^ (m >> 1);
    std::uint64_t diff = gray ^ prev_gray;
    cur ^= rows[std::countr_zero(diff)];
    cw[gray] = cur;
    prev_gray = gray;
  }
  return cw;
}

Eigen::MatrixXd bpsk_matrix(const std::vector<std::uint64_t>& words,
                            std::size_t n, double P) {
  const double s = std::sqrt(P);
  Eigen::MatrixXd A(n, words.size());
  for (std::size_t j = 0; j < words.size(); ++j)
    for (std::size_t i = 0; i < n; ++i)
      A(i, j) = ((words[j] >> i) & 1) ? -s : s;
  return A;
}

}  // namespace

Codebook make_bch_subcode(const gf2::BinaryCode& code, bool exclude_allones,
                          double P) {
  if (code.n > 63) {
    throw std::invalid_argument("make_bch_subcode: weight enumeration capped at n <= 63");
  }
  gf2::BinaryCode work = code;
  if (exclude_allones) {
    const std::uint64_t ones = (code.n == 64) ? ~0ULL
                                              : ((std::uint64_t{1} << code.n) - 1);
    auto cw = enumerate_codewords(code);
    std::uint64_t combo = 0;
    bool found = false;
    for (std::uint64_t m = 1; m < cw.size(); ++m) {
      if (cw[m] == ones) { combo = m; found = true; break; }
    }
    if (!found) {
      throw std::invalid_argument("make_bch_subcode: all-one word is not a codeword");
    }
    // Drop one generator row participating in the all-ones combination.
    std::size_t drop = 63 - static_cast<std::size_t>(std::countl_zero(combo));
    std::vector<std::uint64_t> rows;
    for (std::size_t r = 0; r < code.k; ++r) {
      if (r == drop) continue;
      std::uint64_t w = 0;
      for (std::size_t c = 0; c < code.n; ++c)
        if (code.G.get(r, c)) w |= std::uint64_t{1} << c;
      rows.push_back(w);
    }
    work = gf2::code_from_rows(code.n, rows);
    for (std::uint64_t w : enumerate_codewords(work)) {
      if (w == ones) {
        throw std::runtime_error("make_bch_subcode: all-ones survived row drop");
      }
    }
  }
  Codebook cb;
  cb.ensemble = Ensemble::bch_subcode;
  cb.power = P;
  cb.cols = bpsk_matrix(enumerate_codewords(work), work.n, P);
  return cb;
}

Codebook make_superimposed(const gf2::Matrix& H, double P) {
  const std::size_t r = H.rows(), n_code = H.cols();
  Codebook cb;
  cb.ensemble = Ensemble::superimposed_parity;
  cb.power = P;
  const double s = std::sqrt(P);
  cb.cols.resize(r, n_code);
  for (std::size_t j = 0; j < n_code; ++j)
    for (std::size_t i = 0; i < r; ++i)
      cb.cols(i, j) = H.get(i, j) ? -s : s;
  return cb;
}

Codebook make_binary_chirps(int m) {
  if (m < 1) throw std::invalid_argument("make_binary_chirps: m >= 1");
  if (m > 6) {
    throw std::length_error("make_binary_chirps: m > 6 exceeds the memory guard");
  }
  const int n = 1 << m;
  const int npairs = m * (m - 1) / 2;
  const std::int64_t M = std::int64_t{1} << (m + npairs);
  Codebook cb;
  cb.ensemble = Ensemble::binary_chirp;
  cb.power = 1.0;
  cb.cols.resize(n, M);
  // pair order: (0,1),(0,2),...,(0,m-1),(1,2),... row-major upper triangle
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) pairs.emplace_back(i, j);
  for (std::int64_t col = 0; col < M; ++col) {
    const std::uint32_t b = static_cast<std::uint32_t>(col & (n - 1));
    const std::uint32_t pbits = static_cast<std::uint32_t>(col >> m);
    for (int x = 0; x < n; ++x) {
      int e = std::popcount(b & static_cast<std::uint32_t>(x));
      for (int q = 0; q < npairs; ++q) {
        if ((pbits >> q) & 1) {
          e += ((x >> pairs[q].first) & 1) & ((x >> pairs[q].second) & 1);
        }
      }
      cb.cols(x, col) = (e & 1) ? -1.0 : 1.0;
    }
  }
  return cb;
}

namespace {

template <typename Mat>
CoherenceReport coherence_impl(const Mat& A, RngStream* rng) {
  const Eigen::Index M = A.cols();
  CoherenceReport rep;
  Eigen::VectorXd norms(M);
  for (Eigen::Index j = 0; j < M; ++j) norms(j) = A.col(j).norm();
  double lo = 1.0, hi = -1.0;
  if (M <= (1 << 15)) {
    rep.exact = true;
    const Eigen::Index blk = 512;
    for (Eigen::Index j0 = 0; j0 < M; j0 += blk) {
      Eigen::Index jn = std::min(blk, M - j0);
      for (Eigen::Index i0 = j0; i0 < M; i0 += blk) {
        Eigen::Index in = std::min(blk, M - i0);
        Eigen::MatrixXd G =
            (A.middleCols(i0, in).adjoint() * A.middleCols(j0, jn)).real();
        for (Eigen::Index a = 0; a < in; ++a) {
          for (Eigen::Index b = 0; b < jn; ++b) {
            Eigen::Index i = i0 + a, j = j0 + b;
            if (i <= j) continue;
            double v = G(a, b) / (norms(i) * norms(j));
            lo = std::min(lo, v);
            hi = std::max(hi, v);
            ++rep.pairs_checked;
          }
        }
      }
    }
  } else {
    rep.exact = false;
    RngStream local = rng ? *rng : RngStream(0x5eedULL, 77);
    const std::uint64_t samples = 1000000;
    for (std::uint64_t s = 0; s < samples; ++s) {
      Eigen::Index i = static_cast<Eigen::Index>(local.next_below(M));
      Eigen::Index j = static_cast<Eigen::Index>(local.next_below(M));
      if (i == j) continue;
      double v = std::real(A.col(i).dot(A.col(j))) / (norms(i) * norms(j));
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      ++rep.pairs_checked;
    }
    if (rng) *rng = local;
  }
  rep.min_value = lo;
  rep.max_value = hi;
  return rep;
}

}  // namespace

CoherenceReport coherence(const Codebook& cb, RngStream* rng) {
  if (cb.size() < 2) throw std::invalid_argument("coherence: M >= 2 required");
  if (cb.complex_field) return coherence_impl(cb.ccols, rng);
  return coherence_impl(cb.cols, rng);
}

void save(const Codebook& cb, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("save: cannot open " + path);
  char header[256];
  std::snprintf(header, sizeof(header), "URACB v1 %s %lld %lld %.17g %d\n",
                to_string(cb.ensemble).c_str(),
                static_cast<long long>(cb.n()),
                static_cast<long long>(cb.size()), cb.power,
                cb.complex_field ? 1 : 0);
  f << header;
  const Eigen::Index n = cb.n(), M = cb.size();
  // row-major over the n x M grid; complex entries as (re, im)
  std::vector<double> row(cb.complex_field ? 2 * M : M);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (cb.complex_field) {
      for (Eigen::Index j = 0; j < M; ++j) {
        row[2 * j] = cb.ccols(i, j).real();
        row[2 * j + 1] = cb.ccols(i, j).imag();
      }
    } else {
      for (Eigen::Index j = 0; j < M; ++j) row[j] = cb.cols(i, j);
    }
    f.write(reinterpret_cast<const char*>(row.data()),
            static_cast<std::streamsize>(row.size() * sizeof(double)));
  }
}

Codebook load(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("load: cannot open " + path);
  std::string line;
  std::getline(f, line);
  char magic[16], ver[16], ens[32];
  long long n = 0, M = 0;
  double P = 0;
  int cplx = 0;
  if (std::sscanf(line.c_str(), "%15s %15s %31s %lld %lld %lg %d", magic, ver,
                  ens, &n, &M, &P, &cplx) != 7 ||
      std::string(magic) != "URACB" || std::string(ver) != "v1") {
    throw std::runtime_error("load: bad URACB header in " + path);
  }
  Codebook cb;
  cb.ensemble = ensemble_from_string(ens);
  cb.power = P;
  cb.complex_field = cplx != 0;
  if (cb.complex_field) cb.ccols.resize(n, M); else cb.cols.resize(n, M);
  std::vector<double> row(cb.complex_field ? 2 * M : M);
  for (long long i = 0; i < n; ++i) {
    f.read(reinterpret_cast<char*>(row.data()),
           static_cast<std::streamsize>(row.size() * sizeof(double)));
    if (!f) throw std::runtime_error("load: truncated payload in " + path);
    if (cb.complex_field) {
      for (long long j = 0; j < M; ++j)
        cb.ccols(i, j) = {row[2 * j], row[2 * j + 1]};
    } else {
      for (long long j = 0; j < M; ++j) cb.cols(i, j) = row[j];
    }
  }
  return cb;
}

}  // namespace ura::cb
