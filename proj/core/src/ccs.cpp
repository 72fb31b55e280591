#include "ura/ccs.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#include "ura/cs_decoders.hpp"
#include "ura/numerics.hpp"

namespace ura::ccs {

using num::kNegInf;
using num::log_sum_exp;

void OuterChannelParams::validate() const {
  if (Q < 2 || L < 1 || ka < 1) {
    throw std::invalid_argument("OuterChannelParams: Q >= 2, L >= 1, K_a >= 1");
  }
  if (p_m < 0 || p_m > 1 || p_f < 0 || p_f > 1) {
    throw std::invalid_argument("OuterChannelParams: p_m, p_f in [0,1]");
  }
}

ReceivedLists a_channel(const std::vector<std::vector<std::uint32_t>>& sent,
                        int Q, double p_m, double p_f, RngStream& rng) {
  ReceivedLists out;
  out.lists.resize(sent.size());
  std::vector<char> present(Q);
  for (std::size_t l = 0; l < sent.size(); ++l) {
    std::fill(present.begin(), present.end(), 0);
    for (std::uint32_t s : sent[l]) {
      if (s >= static_cast<std::uint32_t>(Q)) {
        throw std::out_of_range("a_channel: symbol outside [Q]");
      }
      present[s] = 1;
    }
    auto& y = out.lists[l];
    for (int s = 0; s < Q; ++s) {
      if (present[s]) {
        if (p_m <= 0.0 || rng.next_double() >= p_m) y.push_back(s);
      } else {
        if (p_f > 0.0 && rng.next_double() < p_f) y.push_back(s);
      }
    }
  }
  return out;
}

int TreeCode::k() const {
  int s = 0;
  for (int b : bits) s += b;
  return s;
}

std::vector<int> TreeCode::prefix_bits() const {
  std::vector<int> B(bits.size());
  int acc = 0;
  for (std::size_t l = 0; l < bits.size(); ++l) {
    acc += bits[l];
    B[l] = acc;
  }
  return B;
}

int TreeCode::block_of_bit(int i) const {
  int acc = 0;
  for (std::size_t l = 0; l < bits.size(); ++l) {
    acc += bits[l];
    if (i < acc) return static_cast<int>(l);
  }
  throw std::out_of_range("TreeCode::block_of_bit");
}

namespace {

TreeCode make_tree_shell(const std::vector<int>& bits, int c) {
  if (c < 1 || c > 30) throw std::invalid_argument("tree code: 1 <= c <= 30");
  TreeCode tc;
  tc.L = static_cast<int>(bits.size());
  tc.c = c;
  tc.bits = bits;
  int k = tc.k();
  if (k < 1 || k > 63) throw std::invalid_argument("tree code: 1 <= k <= 63");
  tc.bit_symbol.assign(k, std::vector<std::uint32_t>(tc.L, 0));
  return tc;
}

}  // namespace

TreeCode random_tree_code(const std::vector<int>& bits, int c, RngStream& rng) {
  TreeCode tc = make_tree_shell(bits, c);
  const std::uint32_t mask = (c == 32) ? ~0u : ((1u << c) - 1);
  int bit0 = 0;
  for (int lp = 0; lp < tc.L; ++lp) {
    for (int i = 0; i < bits[lp]; ++i) {
      for (int l = lp; l < tc.L; ++l) {
        tc.bit_symbol[bit0 + i][l] =
            static_cast<std::uint32_t>(rng.next_u64()) & mask;
      }
    }
    bit0 += bits[lp];
  }
  return tc;
}

TreeCode systematic_tree_code(const std::vector<int>& bits, int c) {
  TreeCode tc = make_tree_shell(bits, c);
  int bit0 = 0;
  for (int lp = 0; lp < tc.L; ++lp) {
    if (bits[lp] > c) {
      throw std::invalid_argument("systematic_tree_code: b_l <= c required");
    }
    for (int i = 0; i < bits[lp]; ++i) {
      tc.bit_symbol[bit0 + i][lp] = 1u << i;
    }
    bit0 += bits[lp];
  }
  return tc;
}

std::vector<std::uint32_t> tree_encode(const TreeCode& tc, std::uint64_t message) {
  const int k = tc.k();
  if (k < 64 && (message >> k) != 0) {
    throw std::out_of_range("tree_encode: message wider than k bits");
  }
  std::vector<std::uint32_t> x(tc.L, 0);
  std::uint64_t m = message;
  while (m) {
    int i = std::countr_zero(m);
    m &= m - 1;
    for (int l = tc.block_of_bit(i); l < tc.L; ++l) x[l] ^= tc.bit_symbol[i][l];
  }
  return x;
}

TreeDecodeResult tree_decode(const TreeCode& tc, const ReceivedLists& lists,
                             int t, std::size_t path_cap) {
  if (static_cast<int>(lists.lists.size()) != tc.L) {
    throw std::invalid_argument("tree_decode: list count != L");
  }
  if (t >= tc.L) throw std::invalid_argument("tree_decode: t < L required");

  std::vector<char> in_list(static_cast<std::size_t>(tc.L) << tc.c, 0);
  for (int l = 0; l < tc.L; ++l) {
    for (std::uint32_t s : lists.lists[l]) {
      in_list[(static_cast<std::size_t>(l) << tc.c) + s] = 1;
    }
  }

  struct Path {
    std::uint64_t prefix;
    std::vector<std::uint32_t> partial;  // symbol contribution per slot >= l
    int dist;
  };
  TreeDecodeResult out;
  std::vector<Path> live(1);
  live[0].prefix = 0;
  live[0].partial.assign(tc.L, 0);
  live[0].dist = 0;
  int bit0 = 0;
  for (int l = 0; l < tc.L; ++l) {
    const int bl = tc.bits[l];
    std::vector<Path> next;
    next.reserve(live.size() << std::min(bl, 16));
    for (const Path& p : live) {
      const std::uint64_t n_ext = std::uint64_t{1} << bl;
      for (std::uint64_t u = 0; u < n_ext; ++u) {
        Path q = p;
        std::uint64_t uu = u;
        while (uu) {
          int i = std::countr_zero(uu);
          uu &= uu - 1;
          const auto& contrib = tc.bit_symbol[bit0 + i];
          for (int l2 = l; l2 < tc.L; ++l2) q.partial[l2] ^= contrib[l2];
        }
        q.prefix = p.prefix | (u << bit0);
        const std::uint32_t sym = q.partial[l];
        if (!in_list[(static_cast<std::size_t>(l) << tc.c) + sym]) {
          ++q.dist;
        }
        if (q.dist <= t) next.push_back(std::move(q));
      }
    }
    live.swap(next);
    out.max_live_paths = std::max(out.max_live_paths, live.size());
    if (live.size() > path_cap) {
      throw std::length_error("tree_decode: live paths " +
                              std::to_string(live.size()) + " exceed cap " +
                              std::to_string(path_cap) + " at slot " +
                              std::to_string(l + 1));
    }
    bit0 += bl;
  }
  for (const Path& p : live) out.messages.push_back(p.prefix);
  std::sort(out.messages.begin(), out.messages.end());
  return out;
}

PathStats tree_path_stats(const std::vector<int>& bits,
                          const OuterChannelParams& ochan, int t) {
  ochan.validate();
  const int L = static_cast<int>(bits.size());
  const double Q = ochan.Q;
  const double ka = ochan.ka;
  const double lpm = ochan.p_m > 0 ? std::log(ochan.p_m) : kNegInf;
  const double lqm = std::log1p(-ochan.p_m);
  const double g1 = (ka / Q) * ochan.p_m + (1.0 - 1.0 / Q) * (1.0 - ochan.p_f);
  const double g2 = (ka / Q) * (1.0 - ochan.p_m) + (1.0 - 1.0 / Q) * ochan.p_f;
  const double lg1 = g1 > 0 ? std::log(g1) : kNegInf;
  const double lg2 = g2 > 0 ? std::log(g2) : kNegInf;

  std::vector<int> B(L);
  int acc = 0;
  for (int l = 0; l < L; ++l) { acc += bits[l]; B[l] = acc; }

  // a_j = K_a log(1 - 2^-B_j); lambda_j via differences (j is 1-based here,
  // a[0] corresponds to M_1)
  auto a_of = [&](int Bj) { return ka * std::log1p(-std::exp2(-Bj)); };

  PathStats out;
  for (int l = 1; l <= L; ++l) {
    const double logM = B[l - 1] * num::kLn2;
    // rho_j for j = 0..l (j = l is the all-match case)
    auto log_rho = [&](int j) {
      double s = kNegInf;
      for (int x = 0; x <= std::min(j, t); ++x) {
        for (int y = 0; y <= std::min(l - j, t - x); ++y) {
          double term = num::log_binomial(j, x) + num::log_binomial(l - j, y) +
                        x * lpm + (j - x) * lqm + y * lg1 + (l - j - y) * lg2;
          s = log_sum_exp(s, term);
        }
      }
      return s;
    };
    // lambda weights
    auto log_lambda = [&](int j) {
      if (j == 0) return a_of(B[0]);
      if (j == l) return std::log1p(-std::exp(a_of(B[l - 1])));
      double aj = a_of(B[j - 1]);
      double aj1 = a_of(B[j]);
      if (aj1 <= aj) return kNegInf;
      return aj + std::log(std::expm1(aj1 - aj));
    };
    out.log_correct.push_back(logM + log_rho(l) + log_lambda(l));
    double vf = kNegInf;
    for (int j = 0; j < l; ++j) {
      vf = log_sum_exp(vf, log_rho(j) + log_lambda(j));
    }
    out.log_false.push_back(logM + vf);
  }
  return out;
}

double mu_r(int Q, double p_m, double p_f, int r) {
  const double w = std::pow((Q - 1.0) / Q, r);
  return (1.0 - w) * (1.0 - p_m) + w * p_f;
}

std::vector<double> log_stirling2_row(int n) {
  std::vector<double> row{0.0};  // S(0,0) = 1
  for (int i = 1; i <= n; ++i) {
    std::vector<double> next(i + 1, kNegInf);
    for (int r = 1; r <= i; ++r) {
      double carry = r < static_cast<int>(row.size())
                         ? std::log(static_cast<double>(r)) + row[r]
                         : kNegInf;
      double newgrp = r - 1 < static_cast<int>(row.size()) ? row[r - 1] : kNegInf;
      next[r] = log_sum_exp(carry, newgrp);
    }
    row = std::move(next);
  }
  return row;
}

namespace {

double log_binom_tail_upper(int L, double p, int from) {
  // ln sum_{i=from}^{L} C(L,i) p^i (1-p)^{L-i}
  if (from > L) return kNegInf;
  if (p <= 0.0) return from == 0 ? 0.0 : kNegInf;
  double lp = std::log(p);
  double lq = p < 1.0 ? std::log1p(-p) : kNegInf;
  double s = kNegInf;
  for (int i = from; i <= L; ++i) {
    double term = num::log_binomial(L, i) + i * lp;
    if (L - i > 0) {
      if (p >= 1.0) continue;
      term += (L - i) * lq;
    }
    s = log_sum_exp(s, term);
  }
  return s;
}

double log_accept_false(int L, int t, double mu) {
  // ln sum_{i=0}^{t} C(L,i) (1-mu)^i mu^{L-i}
  double s = kNegInf;
  double lmu = mu > 0 ? std::log(mu) : kNegInf;
  double l1mu = mu < 1 ? std::log1p(-mu) : kNegInf;
  for (int i = 0; i <= t; ++i) {
    double term = num::log_binomial(L, i);
    if (i > 0) term += i * l1mu;
    if (L - i > 0) term += (L - i) * lmu;
    s = log_sum_exp(s, term);
  }
  return s;
}

}  // namespace

RcbResult ccs_rcb(const OuterChannelParams& ochan, double M_log2, int t) {
  ochan.validate();
  if (t >= ochan.L) throw std::invalid_argument("ccs_rcb: t < L required");
  RcbResult out;
  out.log_pe = log_binom_tail_upper(ochan.L, ochan.p_m, t + 1);
  const double mu = mu_r(ochan.Q, ochan.p_m, ochan.p_f, ochan.ka);
  const double log_m_minus_ka =
      M_log2 * num::kLn2 + std::log1p(-ochan.ka * std::exp2(-M_log2));
  const double log_pprime =
      ochan.ka >= 2 ? num::log_binomial(ochan.ka, 2) - M_log2 * num::kLn2
                    : kNegInf;
  out.log_pf = log_sum_exp(log_m_minus_ka + log_accept_false(ochan.L, t, mu),
                           log_pprime);
  return out;
}

RcbResult ccs_rcb_exact(const OuterChannelParams& ochan, double M_log2, int t) {
  ochan.validate();
  if (t >= ochan.L) throw std::invalid_argument("ccs_rcb_exact: t < L required");
  RcbResult out;
  out.log_pe = log_binom_tail_upper(ochan.L, ochan.p_m, t + 1);
  auto lS = log_stirling2_row(ochan.ka);
  double s = kNegInf;
  for (int r = 1; r <= ochan.ka; ++r) {
    // nu_r = M!/(M-r)! / M^{K_a} * S(K_a, r)
    double log_perm = 0.0;
    for (int i = 0; i < r; ++i) {
      log_perm += M_log2 * num::kLn2 + std::log1p(-i * std::exp2(-M_log2));
    }
    double log_nu = log_perm - ochan.ka * M_log2 * num::kLn2 + lS[r];
    double log_m_minus_r =
        M_log2 * num::kLn2 + std::log1p(-r * std::exp2(-M_log2));
    double mu = mu_r(ochan.Q, ochan.p_m, ochan.p_f, r);
    s = log_sum_exp(s, log_nu + log_m_minus_r +
                           log_accept_false(ochan.L, t, mu));
  }
  out.log_pf = s;
  return out;
}

double outer_capacity(const OuterChannelParams& ochan) {
  ochan.validate();
  const double Q = ochan.Q;
  const double w = std::pow((Q - 1.0) / Q, ochan.ka);
  const double cond = Q * (1.0 - w) * num::binary_entropy(ochan.p_m, 2.0) +
                      Q * w * num::binary_entropy(ochan.p_f, 2.0);
  const double hy = Q * num::binary_entropy(
                            mu_r(ochan.Q, ochan.p_m, ochan.p_f, ochan.ka), 2.0);
  return hy - cond;
}

double outer_capacity_exact(const OuterChannelParams& ochan) {
  ochan.validate();
  const int Q = ochan.Q, ka = ochan.ka;
  if (Q > 20 || std::pow(static_cast<double>(Q), ka) > std::exp2(20)) {
    throw std::invalid_argument("outer_capacity_exact: Q^{K_a} too large");
  }
  // distribution over the union set Y^(A), by enumeration of inputs
  std::map<std::uint32_t, double> pa;
  std::uint64_t total = 1;
  for (int i = 0; i < ka; ++i) total *= Q;
  std::vector<int> tuple(ka, 0);
  for (std::uint64_t it = 0; it < total; ++it) {
    std::uint64_t v = it;
    std::uint32_t mask = 0;
    for (int i = 0; i < ka; ++i) {
      mask |= 1u << (v % Q);
      v /= Q;
    }
    pa[mask] += 1.0 / static_cast<double>(total);
  }
  // H(Y | inputs) is determined by |Y^(A)|
  double h_cond = 0.0;
  for (auto& [mask, p] : pa) {
    int omega = std::popcount(mask);
    h_cond += p * (omega * num::binary_entropy(ochan.p_m, 2.0) +
                   (Q - omega) * num::binary_entropy(ochan.p_f, 2.0));
  }
  // H(Y) over all 2^Q outputs
  double h_y = 0.0;
  for (std::uint32_t y = 0; y < (1u << Q); ++y) {
    double py = 0.0;
    for (auto& [mask, p] : pa) {
      double cond = 1.0;
      for (int s = 0; s < Q; ++s) {
        bool in_a = (mask >> s) & 1;
        bool in_y = (y >> s) & 1;
        double pr = in_a ? (in_y ? 1.0 - ochan.p_m : ochan.p_m)
                         : (in_y ? ochan.p_f : 1.0 - ochan.p_f);
        cond *= pr;
        if (cond == 0.0) break;
      }
      py += p * cond;
    }
    if (py > 0.0) h_y -= py * std::log2(py);
  }
  return h_y - h_cond;
}

double outer_converse(const OuterChannelParams& ochan, double eps,
                      double list_log2) {
  if (!(eps > 0.0 && eps < 1.0)) {
    throw std::domain_error("outer_converse: eps in (0,1)");
  }
  const double iu = outer_capacity(ochan);
  return (ochan.L * iu / ochan.ka + num::binary_entropy(eps, 2.0) +
          (1.0 - eps) * list_log2) /
         (1.0 - eps);
}

// --- GF(2^w) arithmetic for the RS scheme -----------------------------------

namespace {

class GFq {
 public:
  explicit GFq(int q) : q_(q) {
    static const std::map<int, int> prim = {
        {2, 0x7},     {3, 0xB},     {4, 0x13},    {5, 0x25},
        {6, 0x43},    {7, 0x83},    {8, 0x11D},   {9, 0x211},
        {10, 0x409},  {11, 0x805},  {12, 0x1053}, {13, 0x201B},
        {14, 0x4443}, {15, 0x8003}, {16, 0x1100B}};
    int w = std::countr_zero(static_cast<unsigned>(q));
    if (q != (1 << w) || w < 2 || w > 16) {
      throw std::invalid_argument("GFq: q must be 2^w, 2 <= w <= 16");
    }
    poly_ = prim.at(w);
    exp_.resize(2 * (q - 1));
    log_.assign(q, 0);
    int x = 1;
    for (int i = 0; i < q - 1; ++i) {
      exp_[i] = x;
      log_[x] = i;
      x <<= 1;
      if (x & q) x ^= poly_;
    }
    if (x != 1) throw std::logic_error("GFq: polynomial not primitive");
    for (int i = q - 1; i < 2 * (q - 1); ++i) exp_[i] = exp_[i - (q - 1)];
  }

  int mul(int a, int b) const {
    if (a == 0 || b == 0) return 0;
    return exp_[log_[a] + log_[b]];
  }
  int alpha_pow(int i) const { return exp_[i % (q_ - 1)]; }
  int eval_poly(std::span<const int> coeffs, int x) const {
    int acc = 0;
    for (std::size_t i = coeffs.size(); i-- > 0;) {
      acc = mul(acc, x) ^ coeffs[i];
    }
    return acc;
  }

 private:
  int q_;
  int poly_;
  std::vector<int> exp_;
  std::vector<int> log_;
};

}  // namespace

double rs_max_erasures(int L, int k_o, int ka, int m) {
  return L * (1.0 - std::sqrt((k_o - 1.0) * ka * (m + 1.0) / (m * static_cast<double>(L))));
}

RsResult rs_scheme(const OuterChannelParams& ochan, const RsParams& rs,
                   RsMode mode, int trials, RngStream& rng) {
  ochan.validate();
  const int q = rs.q, qp = mode == RsMode::naive ? 1 : rs.q_p;
  const int Q = q * qp;
  if (Q != ochan.Q) {
    throw std::invalid_argument("rs_scheme: Q != q_p * q");
  }
  if (!(rs.k_o <= rs.L && rs.L < q)) {
    throw std::invalid_argument("rs_scheme: need k_o <= L < q");
  }
  if (mode == RsMode::naive && rs_max_erasures(rs.L, rs.k_o, ochan.ka, rs.m) < 0) {
    throw std::domain_error(
        "rs_scheme: naive mode cannot correct errors at this load "
        "(outer rate above 1/K_a)");
  }
  GFq gf(q);
  std::vector<int> betas(rs.L);
  for (int l = 0; l < rs.L; ++l) betas[l] = gf.alpha_pow(l);

  std::uint64_t n_poly = 1;
  for (int i = 0; i < rs.k_o; ++i) n_poly *= q;

  RsResult res;
  res.trials = trials;
  double err_sum = 0.0, err_sq = 0.0;
  double false_total = 0.0, output_total = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    // draw users: (prefix, info polynomial)
    struct Tx { int prefix; std::vector<int> f; std::vector<int> code; };
    std::vector<Tx> users(ochan.ka);
    for (auto& u : users) {
      u.prefix = mode == RsMode::naive
                     ? 0
                     : static_cast<int>(rng.next_below(qp));
      u.f.resize(rs.k_o);
      for (int& c : u.f) c = static_cast<int>(rng.next_below(q));
      u.code.resize(rs.L);
      for (int l = 0; l < rs.L; ++l) u.code[l] = gf.eval_poly(u.f, betas[l]);
    }
    // slot symbols over [Q]: phi'(s, x) = s * q + x (little-endian packing)
    std::vector<std::vector<std::uint32_t>> sent(rs.L);
    for (auto& u : users) {
      for (int l = 0; l < rs.L; ++l) {
        sent[l].push_back(static_cast<std::uint32_t>(u.prefix * q + u.code[l]));
      }
    }
    ReceivedLists lists = a_channel(sent, Q, ochan.p_m, ochan.p_f, rng);

    // decode each prefix range separately
    std::set<std::pair<int, std::uint64_t>> decoded;
    for (int pre = 0; pre < qp; ++pre) {
      // per-slot q-ary lists for this range
      std::vector<std::vector<char>> in_list(rs.L, std::vector<char>(q, 0));
      std::vector<int> list_sizes(rs.L, 0);
      for (int l = 0; l < rs.L; ++l) {
        for (std::uint32_t s : lists.lists[l]) {
          if (static_cast<int>(s) / q == pre) {
            in_list[l][s % q] = 1;
            ++list_sizes[l];
          }
        }
      }
      double total_pts = 0.0;
      for (int l = 0; l < rs.L; ++l) total_pts += list_sizes[l];
      // recovery predicate: m(L - d) >= sqrt(2 (k_o - 1) C(M)),
      // C(M) = m(m+1)/2 * |P|
      const double rhs =
          std::sqrt((rs.k_o - 1.0) * rs.m * (rs.m + 1.0) * total_pts);
      std::vector<int> f(rs.k_o, 0);
      for (std::uint64_t idx = 0; idx < n_poly; ++idx) {
        std::uint64_t v = idx;
        for (int i = 0; i < rs.k_o; ++i) { f[i] = v % q; v /= q; }
        int misses = 0;
        for (int l = 0; l < rs.L; ++l) {
          if (!in_list[l][gf.eval_poly(f, betas[l])]) ++misses;
        }
        if (rs.m * (rs.L - misses) >= rhs) {
          // CRC: transmitted messages always pass; impostors pass w.p. 2^-b_c
          bool transmitted = false;
          for (const auto& u : users) {
            if (u.prefix == pre && std::equal(u.f.begin(), u.f.end(), f.begin())) {
              transmitted = true;
              break;
            }
          }
          bool pass = transmitted;
          if (!transmitted && rs.b_c < 60) {
            pass = rng.next_double() < std::exp2(-rs.b_c);
          }
          if (pass) decoded.insert({pre, idx});
        }
      }
    }
    int missed = 0;
    for (const auto& u : users) {
      std::uint64_t idx = 0, mult = 1;
      for (int i = 0; i < rs.k_o; ++i) { idx += mult * u.f[i]; mult *= q; }
      if (!decoded.count({u.prefix, idx})) ++missed;
    }
    int false_cnt = static_cast<int>(decoded.size());
    for (const auto& u : users) {
      std::uint64_t idx = 0, mult = 1;
      for (int i = 0; i < rs.k_o; ++i) { idx += mult * u.f[i]; mult *= q; }
      if (decoded.count({u.prefix, idx})) --false_cnt;
    }
    double frac = static_cast<double>(missed) / ochan.ka;
    err_sum += frac;
    err_sq += frac * frac;
    false_total += false_cnt;
    output_total += static_cast<double>(decoded.size());
  }
  res.pupe = err_sum / trials;
  res.far = output_total > 0 ? false_total / output_total : 0.0;
  double var = err_sq / trials - res.pupe * res.pupe;
  res.se_pupe = std::sqrt(std::max(0.0, var) / trials);
  return res;
}

EndToEndResult ccs_end_to_end(const cb::Codebook& inner, const TreeCode& outer,
                              InnerChannel chan, int ka, int K0, int t,
                              int trials, RngStream& rng, double noise_scale) {
  const int Q = 1 << outer.c;
  if (inner.size() != Q) {
    throw std::invalid_argument("ccs_end_to_end: inner codebook size != Q");
  }
  if (chan == InnerChannel::rayleigh && !inner.complex_field) {
    throw std::invalid_argument("ccs_end_to_end: rayleigh needs a complex codebook");
  }
  const int L = outer.L;
  const int kbits = outer.k();
  EndToEndResult res;
  res.trials = trials;
  double miss_sum = 0.0, miss_sq = 0.0, false_sum = 0.0, out_sum = 0.0;
  double slot_miss = 0.0, slot_sent = 0.0, slot_false = 0.0, slot_absent = 0.0;
  const Eigen::Index np = inner.n();
  for (int trial = 0; trial < trials; ++trial) {
    std::vector<std::uint64_t> msgs(ka);
    for (auto& m : msgs) {
      m = kbits >= 64 ? rng.next_u64() : rng.next_below(std::uint64_t{1} << kbits);
    }
    std::vector<std::vector<std::uint32_t>> sym(ka);
    for (int u = 0; u < ka; ++u) sym[u] = tree_encode(outer, msgs[u]);

    ReceivedLists lists;
    lists.lists.resize(L);
    for (int l = 0; l < L; ++l) {
      std::set<std::uint32_t> sent_set;
      for (int u = 0; u < ka; ++u) sent_set.insert(sym[u][l]);
      std::vector<int> detected;
      if (!inner.complex_field) {
        Eigen::VectorXd y = Eigen::VectorXd::Zero(np);
        for (int u = 0; u < ka; ++u) y += inner.cols.col(sym[u][l]);
        if (noise_scale != 0.0) {
          for (Eigen::Index i = 0; i < np; ++i)
            y(i) += noise_scale * rng.next_gaussian();
        }
        auto est = cs::omp(inner.cols, y, K0);
        detected = est.indices;
      } else {
        Eigen::VectorXcd y = Eigen::VectorXcd::Zero(np);
        for (int u = 0; u < ka; ++u) {
          std::complex<double> h =
              chan == InnerChannel::rayleigh ? rng.next_cgaussian()
                                             : std::complex<double>(1.0, 0.0);
          y += h * inner.ccols.col(sym[u][l]);
        }
        if (noise_scale != 0.0) {
          for (Eigen::Index i = 0; i < np; ++i)
            y(i) += noise_scale * rng.next_cgaussian();
        }
        auto est = cs::omp(inner.ccols, y, K0);
        detected = est.indices;
      }
      auto& yl = lists.lists[l];
      for (int d : detected) yl.push_back(static_cast<std::uint32_t>(d));
      std::sort(yl.begin(), yl.end());
      // slot-level missed/false accounting
      int hit = 0;
      for (std::uint32_t s : sent_set) {
        if (std::binary_search(yl.begin(), yl.end(), s)) ++hit;
      }
      slot_miss += static_cast<double>(sent_set.size() - hit);
      slot_sent += static_cast<double>(sent_set.size());
      slot_false += static_cast<double>(yl.size() - hit);
      slot_absent += static_cast<double>(Q - sent_set.size());
    }

    auto dec = tree_decode(outer, lists, t);
    int missed = 0;
    for (int u = 0; u < ka; ++u) {
      if (!std::binary_search(dec.messages.begin(), dec.messages.end(), msgs[u])) {
        ++missed;
      }
    }
    std::set<std::uint64_t> txset(msgs.begin(), msgs.end());
    int false_cnt = 0;
    for (std::uint64_t m : dec.messages) {
      if (!txset.count(m)) ++false_cnt;
    }
    double frac = static_cast<double>(missed) / ka;
    miss_sum += frac;
    miss_sq += frac * frac;
    false_sum += false_cnt;
    out_sum += static_cast<double>(dec.messages.size());
  }
  res.pupe = miss_sum / trials;
  double var = miss_sq / trials - res.pupe * res.pupe;
  res.se_pupe = std::sqrt(std::max(0.0, var) / trials);
  res.far = out_sum > 0 ? false_sum / out_sum : 0.0;
  res.slot_pm = slot_sent > 0 ? slot_miss / slot_sent : 0.0;
  res.slot_pf = slot_absent > 0 ? slot_false / slot_absent : 0.0;
  return res;
}

}  // namespace ura::ccs
