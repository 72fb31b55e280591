#include "ura/bac2.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace ura::bac2 {

namespace {

std::uint64_t encode64(const gf2::BinaryCode& code, std::uint64_t msg) {
  auto bits = gf2::encode(code, msg);
  return bits[0];
}

}  // namespace

Bac2Instance Bac2Instance::from_received(const gf2::BinaryCode& code,
                                         std::span<const int> y) {
  if (y.size() != code.n) {
    throw std::invalid_argument("Bac2Instance: |y| != n");
  }
  Bac2Instance inst;
  inst.code = &code;
  inst.y.assign(y.begin(), y.end());
  for (std::size_t j = 0; j < y.size(); ++j) {
    if (y[j] < 0 || y[j] > 2) {
      throw std::invalid_argument("Bac2Instance: y over {0,1,2}");
    }
    if (y[j] == 1) inst.erasures.push_back(j);
  }
  return inst;
}

std::vector<CodewordPair> bac2_decode(const Bac2Instance& inst) {
  const gf2::BinaryCode& code = *inst.code;
  if (!code.has_parity_check()) {
    throw std::invalid_argument("bac2_decode: code needs a parity check");
  }
  const std::size_t n = code.n;
  if (n > 64) throw std::invalid_argument("bac2_decode: n <= 64");
  // Solve H_E x_E^T = H_{E^c} x_{E^c}^T with x_{E^c} pinned by y.
  std::vector<std::size_t> comp;
  std::vector<char> is_erased(n, 0);
  for (std::size_t j : inst.erasures) is_erased[j] = 1;
  for (std::size_t j = 0; j < n; ++j) {
    if (!is_erased[j]) comp.push_back(j);
  }
  std::uint64_t pinned = 0;
  for (std::size_t j : comp) {
    if (inst.y[j] == 2) pinned |= std::uint64_t{1} << j;
  }
  const std::size_t rows = code.H.rows();
  gf2::Matrix He = code.H.select_columns(inst.erasures);
  // rhs_r = sum over pinned columns of H
  std::vector<std::uint64_t> rhs((rows + 63) / 64, 0);
  for (std::size_t r = 0; r < rows; ++r) {
    int acc = 0;
    for (std::size_t j : comp) {
      if (code.H.get(r, j) && ((pinned >> j) & 1)) acc ^= 1;
    }
    if (acc) rhs[r / 64] |= std::uint64_t{1} << (r % 64);
  }
  gf2::LinearSystemSolution sol;
  if (!gf2::solve(He, rhs, sol)) {
    throw std::invalid_argument("bac2_decode: y is not a valid adder output");
  }
  if (sol.null_basis.size() > 30) {
    throw std::length_error("bac2_decode: solution space too large");
  }
  const std::size_t E = inst.erasures.size();
  std::uint64_t ones_e = 0;
  for (std::size_t idx = 0; idx < E; ++idx) ones_e |= std::uint64_t{1} << idx;

  auto unpack = [&](std::uint64_t xe) {
    std::uint64_t w = pinned;
    for (std::size_t idx = 0; idx < E; ++idx) {
      if ((xe >> idx) & 1) w |= std::uint64_t{1} << inst.erasures[idx];
    }
    return w;
  };

  std::vector<CodewordPair> pairs;
  const std::size_t dim = sol.null_basis.size();
  std::uint64_t part = sol.particular.empty() ? 0 : sol.particular[0];
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << dim); ++m) {
    std::uint64_t xe = part;
    for (std::size_t b = 0; b < dim; ++b) {
      if ((m >> b) & 1) xe ^= sol.null_basis[b][0];
    }
    std::uint64_t partner = xe ^ ones_e;
    if (xe > partner) continue;  // count each unordered pair once
    pairs.emplace_back(unpack(xe), unpack(partner));
  }
  return pairs;
}

namespace {

// s such that the pair count is 2^{s-1}, with x1 = 0 and x2 = word:
// E = supp(word), s = |E| - rank(H_E)
int solution_exponent(const gf2::BinaryCode& code, std::uint64_t x2) {
  std::vector<std::size_t> erased;
  for (std::size_t j = 0; j < code.n; ++j) {
    if ((x2 >> j) & 1) erased.push_back(j);
  }
  if (erased.empty()) return 1;  // unique trivial pair (x, x)
  gf2::Matrix He = code.H.select_columns(erased);
  return static_cast<int>(erased.size() - He.rank());
}

}  // namespace

PupeResult bac2_pupe(const gf2::BinaryCode& code, PupeMode mode, int mc_trials,
                     RngStream* rng) {
  PupeResult res;
  if (mode == PupeMode::exact_small) {
    if (code.k > 20) {
      throw std::invalid_argument("bac2_pupe: exact mode needs 2^k <= 2^20");
    }
    double acc = 0.0;
    const std::uint64_t total = std::uint64_t{1} << code.k;
    for (std::uint64_t m = 0; m < total; ++m) {
      int s = solution_exponent(code, encode64(code, m));
      acc += std::exp2(-(s - 1));
      ++res.evaluated;
    }
    res.pe = 1.0 - acc / static_cast<double>(total);
    return res;
  }
  if (!rng) throw std::invalid_argument("bac2_pupe: monte_carlo needs an rng");
  double sum = 0.0, sq = 0.0;
  for (int it = 0; it < mc_trials; ++it) {
    std::uint64_t m1 = rng->next_below(std::uint64_t{1} << code.k);
    std::uint64_t m2 = rng->next_below(std::uint64_t{1} << code.k);
    std::uint64_t diff = encode64(code, m1) ^ encode64(code, m2);
    int s = solution_exponent(code, diff);
    double correct = std::exp2(-(s - 1));
    sum += 1.0 - correct;
    sq += (1.0 - correct) * (1.0 - correct);
    ++res.evaluated;
  }
  res.pe = sum / mc_trials;
  double var = sq / mc_trials - res.pe * res.pe;
  res.se = std::sqrt(std::max(0.0, var) / mc_trials);
  return res;
}

double bac2_converse(int n, int k) {
  if (k < 2) throw std::domain_error("bac2_converse: k >= 2");
  return std::max(0.0, 0.5 * (1.0 - n / (2.0 * k - 2.0)));
}

bool is_minimal_codeword(const gf2::BinaryCode& code, std::uint64_t word) {
  if (word == 0) return false;
  const std::uint64_t total = std::uint64_t{1} << code.k;
  for (std::uint64_t m = 1; m < total; ++m) {
    std::uint64_t c = encode64(code, m);
    if (c == word || c == 0) continue;
    if ((c & ~word) == 0) return false;  // supp(c) inside supp(word)
  }
  return true;
}

bool is_minimal_code(const gf2::BinaryCode& code) {
  const std::uint64_t total = std::uint64_t{1} << code.k;
  for (std::uint64_t m = 1; m < total; ++m) {
    if (!is_minimal_codeword(code, encode64(code, m))) return false;
  }
  return true;
}

}  // namespace ura::bac2
