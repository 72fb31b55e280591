#include "ura/irsa.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <map>
#include <mutex>
#include <stdexcept>

#include "ura/numerics.hpp"
#include "ura/optimize.hpp"

namespace ura::irsa {

using num::kNegInf;
using num::log_sum_exp;

double DegreeDistribution::mean_degree() const {
  double m = 0.0;
  for (std::size_t i = 0; i < node_coeffs.size(); ++i)
    m += (i + 1.0) * node_coeffs[i];
  return m;
}

double DegreeDistribution::node_eval(double x) const {
  double v = 0.0, xp = x;
  for (double c : node_coeffs) {
    v += c * xp;
    xp *= x;
  }
  return v;
}

double DegreeDistribution::edge_eval(double x) const {
  double m = mean_degree();
  double v = 0.0, xp = 1.0;
  for (std::size_t i = 0; i < node_coeffs.size(); ++i) {
    v += (i + 1.0) * node_coeffs[i] * xp;
    xp *= x;
  }
  return v / m;
}

std::vector<double> DegreeDistribution::edge_coeffs() const {
  double m = mean_degree();
  std::vector<double> e(node_coeffs.size());
  for (std::size_t i = 0; i < node_coeffs.size(); ++i)
    e[i] = (i + 1.0) * node_coeffs[i] / m;
  return e;
}

int DegreeDistribution::max_degree() const {
  for (std::size_t i = node_coeffs.size(); i-- > 0;) {
    if (node_coeffs[i] > 0) return static_cast<int>(i + 1);
  }
  return 0;
}

void DegreeDistribution::validate() const {
  double s = 0.0;
  for (double c : node_coeffs) {
    if (c < -1e-12) throw std::invalid_argument("DegreeDistribution: negative coefficient");
    s += c;
  }
  if (std::abs(s - 1.0) > 1e-9) {
    throw std::invalid_argument("DegreeDistribution: coefficients must sum to 1");
  }
}

DegreeDistribution DegreeDistribution::single_degree(int d) {
  DegreeDistribution dd;
  dd.node_coeffs.assign(d, 0.0);
  dd.node_coeffs[d - 1] = 1.0;
  return dd;
}

DegreeDistribution DegreeDistribution::from_edge(const std::vector<double>& edge,
                                                 double mean_degree) {
  DegreeDistribution dd;
  dd.node_coeffs.resize(edge.size());
  for (std::size_t i = 0; i < edge.size(); ++i)
    dd.node_coeffs[i] = edge[i] * mean_degree / (i + 1.0);
  return dd;
}

std::vector<int> IrsaFrame::collision_orders() const {
  std::vector<int> o(slot_users.size());
  for (std::size_t s = 0; s < slot_users.size(); ++s)
    o[s] = static_cast<int>(slot_users[s].size());
  return o;
}

IrsaFrame sample_frame(const DegreeDistribution& dd, int ka, int L,
                       RngStream& rng) {
  dd.validate();
  if (dd.max_degree() > L) {
    throw std::invalid_argument("sample_frame: max degree exceeds slot count");
  }
  IrsaFrame fr;
  fr.L = L;
  fr.user_slots.resize(ka);
  fr.slot_users.resize(L);
  for (int u = 0; u < ka; ++u) {
    double p = rng.next_double();
    int d = 1;
    double acc = 0.0;
    for (std::size_t i = 0; i < dd.node_coeffs.size(); ++i) {
      acc += dd.node_coeffs[i];
      if (p < acc) { d = static_cast<int>(i + 1); break; }
      d = static_cast<int>(i + 1);
    }
    // Floyd's algorithm: uniform d-subset of [0, L)
    std::vector<int> chosen;
    for (int j = L - d; j < L; ++j) {
      int t = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(j) + 1));
      if (std::find(chosen.begin(), chosen.end(), t) == chosen.end()) {
        chosen.push_back(t);
      } else {
        chosen.push_back(j);
      }
    }
    std::sort(chosen.begin(), chosen.end());
    fr.user_slots[u] = chosen;
    for (int s : chosen) fr.slot_users[s].push_back(u);
  }
  return fr;
}

SlotErrorModel perfect_slot_model(int T) {
  SlotErrorModel m;
  m.T = T;
  m.p_tilde.assign(T, 0.0);
  m.alpha.assign(T, 1.0 / T);
  return m;
}

namespace {

// rho-trick exponent with the closed-form Chernoff lambda; valid for the
// symmetric case t_hat == t and used as a seed/anchor elsewhere.
double exponent_closed_lambda(double r1, double r2, double pt, double rho1,
                              double rho2) {
  const double rr = rho1 * rho2;
  const double d = (pt - 1.0) * (pt - 1.0) + 4.0 * pt * (1.0 + rr) / (1.0 + rho2);
  const double lam = (pt - 1.0 + std::sqrt(d)) / (4.0 * (1.0 + rr) * pt);
  const double mu = rho2 * lam / (1.0 + 2.0 * pt * lam);
  const double a = rho2 * std::log1p(2.0 * pt * lam) + std::log1p(2.0 * pt * mu);
  const double b = rho2 * lam - mu / (1.0 + 2.0 * pt * mu);
  const double feas = 1.0 - 2.0 * b * rho1;
  if (!(feas > 0.0)) return -std::numeric_limits<double>::infinity();
  const double e0 = 0.5 * (rho1 * a + std::log(feas));
  return -rr * r1 - rho1 * r2 + e0;
}

double exponent_free_lambda(double r1, double r2, double p, int t, int t_hat,
                            double rho1, double rho2, double lam) {
  const double pt = p * t;
  const double pth = p * t_hat;
  const double mu = rho2 * lam / (1.0 + 2.0 * pth * lam);
  const double a = rho2 * std::log1p(2.0 * pth * lam) + std::log1p(2.0 * pt * mu);
  const double b = rho2 * lam - mu / (1.0 + 2.0 * pt * mu);
  const double feas = 1.0 - 2.0 * b * rho1;
  if (!(feas > 0.0)) return -std::numeric_limits<double>::infinity();
  const double e0 = 0.5 * (rho1 * a + std::log(feas));
  return -rho1 * rho2 * r1 - rho1 * r2 + e0;
}

}  // namespace

double blind_exponent(int n_prime, int k_bits, double power, int r, int t,
                      int t_hat, std::size_t budget) {
  const double n = n_prime;
  const double r1 = t_hat > 0 ? num::log_binomial_pow2(k_bits, r, t_hat) / n : 0.0;
  const double r2 = num::log_binomial(r, t) / n;
  if (t == t_hat) {
    // identical structure to the frame-level rho-trick bound
    num::OptBox box;
    box.names = {"rho1", "rho2"};
    box.lo = {0.0, 0.0};
    box.hi = {1.0, 1.0};
    const double pt = power * t;
    auto f = [&](const std::vector<double>& x) {
      double e = exponent_closed_lambda(r1, r2, pt, x[0], x[1]);
      return -e;
    };
    return -num::minimize_box(f, box, budget).min;
  }
  num::OptBox box;
  box.names = {"rho1", "rho2", "lambda"};
  box.lo = {0.0, 0.0, 1e-9};
  const double lam_hi = 20.0 / (1.0 + power * std::max(t, t_hat));
  box.hi = {1.0, 1.0, lam_hi};
  auto f = [&](const std::vector<double>& x) {
    double e = exponent_free_lambda(r1, r2, power, t, t_hat, x[0], x[1], x[2]);
    return -e;
  };
  return -num::minimize_box(f, box, budget).min;
}

SlotErrorModel slot_blind_bound(int n_prime, int k_bits, double power, int T,
                                std::span<const double> alpha,
                                std::size_t budget) {
  if (T < 1) throw std::invalid_argument("slot_blind_bound: T >= 1");
  SlotErrorModel m;
  m.T = T;
  if (alpha.empty()) {
    m.alpha.assign(T, (1.0 - 1e-3) / T);
  } else {
    if (static_cast<int>(alpha.size()) != T) {
      throw std::invalid_argument("slot_blind_bound: alpha size != T");
    }
    m.alpha.assign(alpha.begin(), alpha.end());
    double s = 0.0;
    for (double a : m.alpha) s += a;
    if (s >= 1.0) throw std::invalid_argument("slot_blind_bound: sum alpha < 1 required");
  }
  m.p_tilde.resize(T);
  const double n = n_prime;
  for (int r = 1; r <= T; ++r) {
    double log_sum = kNegInf;  // sum_t (t/r) p_t(r, T)
    for (int t = 1; t <= r; ++t) {
      double log_pt = kNegInf;  // p_t(r,T) = sum_{t_hat} exp(-n E)
      for (int t_hat = 0; t_hat <= T - r + t; ++t_hat) {
        double e = blind_exponent(n_prime, k_bits, power, r, t, t_hat, budget);
        log_pt = log_sum_exp(log_pt, -n * e);
      }
      log_sum = log_sum_exp(log_sum, std::log(t / static_cast<double>(r)) + log_pt);
    }
    double v = std::exp(log_sum - std::log(m.alpha[r - 1]));
    m.p_tilde[r - 1] = std::min(1.0, v);
  }
  // the bound is monotone in r by construction; enforce against optimizer noise
  for (int r = 1; r < T; ++r) {
    m.p_tilde[r] = std::max(m.p_tilde[r], m.p_tilde[r - 1]);
  }
  return m;
}

std::size_t PeelResult::resolved_count() const {
  std::size_t c = 0;
  for (bool b : resolved) c += b;
  return c;
}

namespace {

PeelResult peel_ideal(const IrsaFrame& frame, int T) {
  const int ka = static_cast<int>(frame.user_slots.size());
  PeelResult res;
  res.resolved.assign(ka, false);
  res.resolve_round.assign(ka, -1);
  std::vector<int> residual(frame.L);
  for (int s = 0; s < frame.L; ++s)
    residual[s] = static_cast<int>(frame.slot_users[s].size());
  std::vector<bool> slot_done(frame.L, false);
  int round = 0;
  bool progress = true;
  while (progress) {
    progress = false;
    for (int s = 0; s < frame.L; ++s) {
      if (slot_done[s] || residual[s] == 0 || residual[s] > T) continue;
      ++round;
      slot_done[s] = true;
      for (int u : frame.slot_users[s]) {
        if (res.resolved[u]) continue;
        res.resolved[u] = true;
        res.resolve_round[u] = round;
        for (int s2 : frame.user_slots[u]) --residual[s2];
      }
      progress = true;
      break;  // one slot per step, lowest index first
    }
  }
  res.rounds = round;
  return res;
}

PeelResult peel_stochastic(const IrsaFrame& frame, int T,
                           const SlotErrorModel& model, RngStream& rng,
                           int iters) {
  const int ka = static_cast<int>(frame.user_slots.size());
  PeelResult res;
  res.resolved.assign(ka, false);
  res.resolve_round.assign(ka, -1);

  // x[u][j]: erasure of the message from user u toward its j-th slot
  std::vector<std::vector<char>> x(ka), x_next(ka);
  for (int u = 0; u < ka; ++u) {
    x[u].assign(frame.user_slots[u].size(), 1);
    x_next[u] = x[u];
  }
  // y[u][j]: erasure of the message from the j-th slot of u back to u
  std::vector<std::vector<char>> y(ka);
  for (int u = 0; u < ka; ++u) y[u].assign(frame.user_slots[u].size(), 1);

  std::vector<std::vector<int>> slot_pos(frame.L);  // position of u in its slot list
  std::vector<std::vector<int>> user_pos(frame.L);
  for (int s = 0; s < frame.L; ++s) {
    for (int u : frame.slot_users[s]) {
      auto& us = frame.user_slots[u];
      int j = static_cast<int>(std::find(us.begin(), us.end(), s) - us.begin());
      user_pos[s].push_back(j);
    }
  }

  for (int round = 1; round <= iters; ++round) {
    // slot phase: y from x
    for (int s = 0; s < frame.L; ++s) {
      const auto& users = frame.slot_users[s];
      int erased_total = 0;
      for (std::size_t i = 0; i < users.size(); ++i)
        erased_total += x[users[i]][user_pos[s][i]];
      for (std::size_t i = 0; i < users.size(); ++i) {
        int u = users[i];
        int j = user_pos[s][i];
        int t_other = erased_total - x[u][j];
        bool delivered = false;
        if (t_other + 1 <= T) {
          double pf = model.failure(t_other + 1);
          delivered = pf <= 0.0 || rng.next_double() >= pf;
        }
        y[u][j] = delivered ? 0 : 1;
      }
    }
    // user phase: x from y (erased iff all other slots erased)
    for (int u = 0; u < ka; ++u) {
      const auto& ys = y[u];
      int non_erased = 0;
      for (char e : ys) non_erased += (e == 0);
      for (std::size_t j = 0; j < ys.size(); ++j) {
        int others = non_erased - (ys[j] == 0 ? 1 : 0);
        x_next[u][j] = others > 0 ? 0 : 1;
      }
      if (non_erased > 0 && !res.resolved[u]) {
        res.resolved[u] = true;
        res.resolve_round[u] = round;
      } else if (non_erased == 0) {
        res.resolved[u] = false;
        res.resolve_round[u] = -1;
      }
    }
    x.swap(x_next);
  }
  res.rounds = iters;
  return res;
}

}  // namespace

PeelResult peel_decode(const IrsaFrame& frame, int T, SlotOracle oracle,
                       const SlotErrorModel& model, RngStream& rng,
                       int iters) {
  if (oracle == SlotOracle::ideal) return peel_ideal(frame, T);
  return peel_stochastic(frame, T, model, rng, iters);
}

DeResult density_evolution(const DegreeDistribution& dd, double G,
                           const SlotErrorModel& model, int T, int iters) {
  if (iters < 1) throw std::invalid_argument("density_evolution: iters >= 1");
  dd.validate();
  const double gamma = G * dd.mean_degree();
  DeResult out;
  double x = 1.0;
  double y = 1.0;
  for (int l = 1; l <= iters; ++l) {
    // y = 1 - sum_{t=0}^{T-1} (1 - p~(t+1)) e^{-gamma x} (gamma x)^t / t!
    double m = gamma * x;
    double sum = 0.0;
    double log_pois = -m;  // t = 0 term
    for (int t = 0; t < T; ++t) {
      if (t > 0) log_pois += std::log(m) - std::log(static_cast<double>(t));
      double w = std::exp(log_pois);
      sum += (1.0 - model.failure(t + 1)) * w;
    }
    y = 1.0 - std::min(1.0, sum);
    if (l < iters) {
      x = dd.edge_eval(y);
      out.edge_erasure.push_back(x);
    }
  }
  out.final_pupe = dd.node_eval(y);
  return out;
}

namespace {

std::vector<int> slot_length_candidates(int frame_n) {
  std::vector<int> c;
  for (int np = 1; np <= frame_n; ++np) {
    if (frame_n % np == 0 && np >= 100) c.push_back(np);
  }
  return c;
}

struct PGrid {
  std::vector<double> power;                  // ascending
  std::vector<SlotErrorModel> models;         // aligned
};

PGrid build_p_grid(int n_prime, int k_bits, int T, double db_lo, double db_hi,
                   double db_step) {
  PGrid g;
  for (double db = db_lo; db <= db_hi + 1e-9; db += db_step) {
    double single_ebno = std::pow(10.0, db / 10.0);
    double P = single_ebno * 2.0 * k_bits / n_prime;
    g.power.push_back(P);
    g.models.push_back(slot_blind_bound(n_prime, k_bits, P, T, {}, 420));
  }
  return g;
}

struct SimplexEval {
  double ebno_db = std::numeric_limits<double>::infinity();
  int grid_idx = -1;
};

SimplexEval eval_dd_on_grid(const DegreeDistribution& dd, const PGrid& grid,
                            int ka, int k_bits, int n_prime, int frame_n,
                            int T, int iters, double eps) {
  const int L = frame_n / n_prime;
  const double G = static_cast<double>(ka) / L;
  const double md = dd.mean_degree();
  SimplexEval out;
  // DE feasibility is monotone in P; binary search the grid.
  int lo = 0, hi = static_cast<int>(grid.power.size()) - 1;
  auto ok = [&](int i) {
    return density_evolution(dd, G, grid.models[i], T, iters).final_pupe <= eps;
  };
  if (!ok(hi)) return out;
  while (lo < hi) {
    int mid = (lo + hi) / 2;
    if (ok(mid)) hi = mid; else lo = mid + 1;
  }
  out.grid_idx = hi;
  out.ebno_db = 10.0 * std::log10(n_prime * grid.power[hi] * md / (2.0 * k_bits));
  return out;
}

}  // namespace

OptimizedDistribution optimize_distribution(int ka, int k_bits, int T,
                                            int iters, double eps, int frame_n,
                                            int threads) {
  const auto n_primes = slot_length_candidates(frame_n);
  const int max_deg = 4;

  // candidate distributions: simplex grid over degrees 1..4, step 1/12
  std::vector<DegreeDistribution> candidates;
  const int R = 12;
  for (int a = 0; a <= R; ++a) {
    for (int b = 0; b <= R - a; ++b) {
      for (int c = 0; c <= R - a - b; ++c) {
        int d = R - a - b - c;
        DegreeDistribution dd;
        dd.node_coeffs = {a / double(R), b / double(R), c / double(R),
                          d / double(R)};
        while (dd.node_coeffs.size() > 1 && dd.node_coeffs.back() == 0.0) {
          dd.node_coeffs.pop_back();
        }
        if (dd.mean_degree() <= 0) continue;
        candidates.push_back(std::move(dd));
      }
    }
  }

  auto eval_nprime = [&](int n_prime) {
    OptimizedDistribution best;
    best.ebno_db = std::numeric_limits<double>::infinity();
    const int L = frame_n / n_prime;
    if (L < 1) return best;
    PGrid grid = build_p_grid(n_prime, k_bits, T, -6.0, 21.0, 0.25);
    for (const auto& dd : candidates) {
      if (dd.max_degree() > std::min(max_deg, L)) continue;
      SimplexEval ev = eval_dd_on_grid(dd, grid, ka, k_bits, n_prime, frame_n,
                                       T, iters, eps);
      if (ev.ebno_db < best.ebno_db) {
        best.ebno_db = ev.ebno_db;
        best.dd = dd;
        best.n_prime = n_prime;
        best.power = grid.power[ev.grid_idx];
      }
    }
    return best;
  };

  std::vector<OptimizedDistribution> results(n_primes.size());
  std::size_t next = 0;
  std::vector<std::future<void>> workers;
  std::mutex mtx;
  for (int w = 0; w < std::max(1, threads); ++w) {
    workers.push_back(std::async(std::launch::async, [&]() {
      while (true) {
        std::size_t i;
        {
          std::lock_guard<std::mutex> lock(mtx);
          if (next >= n_primes.size()) return;
          i = next++;
        }
        results[i] = eval_nprime(n_primes[i]);
      }
    }));
  }
  for (auto& w : workers) w.get();

  OptimizedDistribution best;
  best.ebno_db = std::numeric_limits<double>::infinity();
  for (const auto& r : results) {
    if (r.ebno_db < best.ebno_db) best = r;
  }
  if (!(best.ebno_db < std::numeric_limits<double>::infinity())) {
    throw std::runtime_error("optimize_distribution: no feasible configuration");
  }

  // polish: local simplex refinement + exact power bisection at the winner
  const int L = frame_n / best.n_prime;
  const double G = static_cast<double>(ka) / L;
  auto ebno_of = [&](const DegreeDistribution& dd, double* power_out) {
    auto feas = [&](double P) {
      auto model = slot_blind_bound(best.n_prime, k_bits, P, T, {}, 700);
      return density_evolution(dd, G, model, T, iters).final_pupe <= eps;
    };
    double lo = best.power / 4.0, hi = best.power * 4.0;
    if (!feas(hi)) return std::numeric_limits<double>::infinity();
    while (feas(lo)) lo /= 2.0;
    for (int it = 0; it < 40 && hi / lo > 1.0005; ++it) {
      double mid = std::sqrt(lo * hi);
      if (feas(mid)) hi = mid; else lo = mid;
    }
    if (power_out) *power_out = hi;
    return 10.0 * std::log10(best.n_prime * hi * dd.mean_degree() / (2.0 * k_bits));
  };

  std::vector<double> start;
  for (double c : best.dd.node_coeffs) start.push_back(c);
  start.resize(4, 0.0);
  num::OptBox box;
  box.names = {"L1", "L2", "L3", "L4"};
  box.lo = {0, 0, 0, 0};
  box.hi = {1, 1, 1, 1};
  auto objective = [&](const std::vector<double>& x) {
    double s = x[0] + x[1] + x[2] + x[3];
    if (s <= 0) return std::numeric_limits<double>::infinity();
    DegreeDistribution dd;
    dd.node_coeffs = {x[0] / s, x[1] / s, x[2] / s, x[3] / s};
    if (dd.max_degree() > std::min(max_deg, L)) {
      return std::numeric_limits<double>::infinity();
    }
    return ebno_of(dd, nullptr);
  };
  auto polish = num::minimize_box_seeded(objective, box, 60, {start});
  {
    double s = 0.0;
    for (double v : polish.argmin) s += v;
    DegreeDistribution dd;
    dd.node_coeffs.clear();
    for (double v : polish.argmin) dd.node_coeffs.push_back(v / s);
    while (dd.node_coeffs.size() > 1 && dd.node_coeffs.back() < 1e-4) {
      dd.node_coeffs.pop_back();
    }
    double s2 = 0.0;
    for (double v : dd.node_coeffs) s2 += v;
    for (double& v : dd.node_coeffs) v /= s2;
    double pw = 0.0;
    double db = ebno_of(dd, &pw);
    if (db < best.ebno_db) {
      best.dd = dd;
      best.ebno_db = db;
      best.power = pw;
    } else {
      double pw2 = 0.0;
      double db2 = ebno_of(best.dd, &pw2);
      if (std::isfinite(db2)) {
        best.ebno_db = db2;
        best.power = pw2;
      }
    }
  }
  best.de_pupe = density_evolution(
                     best.dd, G,
                     slot_blind_bound(best.n_prime, k_bits, best.power, T, {}, 700),
                     T, iters)
                     .final_pupe;
  return best;
}

double slot_to_frame_pupe(std::span<const double> per_slot_pupe, int ka, int L,
                          int T) {
  if (L < 1 || ka < 1) throw std::invalid_argument("slot_to_frame_pupe: bad args");
  double log_keep = kNegInf;  // sum over r of (1-p_r) Binom(ka-1, r-1; 1/L)
  const int rmax = std::min(T, ka);
  for (int r = 1; r <= rmax; ++r) {
    double pr = r - 1 < static_cast<int>(per_slot_pupe.size())
                    ? per_slot_pupe[r - 1]
                    : 1.0;
    if (pr >= 1.0) continue;
    double lw = num::log_binomial(ka - 1, r - 1) -
                (r - 1) * std::log(static_cast<double>(L));
    if (ka - r > 0) {
      if (L == 1) continue;  // (1 - 1/L)^{ka-r} = 0
      lw += (ka - r) * std::log1p(-1.0 / L);
    }
    log_keep = log_sum_exp(log_keep, std::log1p(-pr) + lw);
  }
  if (log_keep == kNegInf) return 1.0;
  return std::max(0.0, 1.0 - std::exp(std::min(0.0, log_keep)));
}

}  // namespace ura::irsa
