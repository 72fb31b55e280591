#include "ura/fading.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "ura/optimize.hpp"

namespace ura::fading {

using num::kNegInf;
using num::log_sum_exp;

namespace {

double proj_energy(const Eigen::MatrixXcd& cols, const Eigen::VectorXcd& y) {
  // energy of the projection of y onto span(cols), via thin QR
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(cols);
  Eigen::MatrixXcd Qthin =
      qr.householderQ() * Eigen::MatrixXcd::Identity(cols.rows(), cols.cols());
  return (Qthin.adjoint() * y).squaredNorm();
}

}  // namespace

std::vector<std::uint32_t> projection_decode(const cb::Codebook& codebook,
                                             const Eigen::VectorXcd& y, int ka,
                                             bool greedy,
                                             std::uint64_t subset_cap) {
  if (!codebook.complex_field) {
    throw std::invalid_argument("projection_decode: complex codebook required");
  }
  const int M = static_cast<int>(codebook.size());
  if (ka >= codebook.n()) {
    throw std::invalid_argument("projection_decode: K_a < n required");
  }
  if (greedy) {
    // heuristic: grow the subset by the largest projection gain
    std::vector<std::uint32_t> chosen;
    Eigen::MatrixXcd basis(codebook.n(), ka);
    Eigen::VectorXcd resid = y;
    for (int step = 0; step < ka; ++step) {
      int best = -1;
      double best_gain = -1.0;
      for (int j = 0; j < M; ++j) {
        if (std::find(chosen.begin(), chosen.end(),
                      static_cast<std::uint32_t>(j)) != chosen.end()) {
          continue;
        }
        Eigen::VectorXcd c = codebook.ccols.col(j);
        for (int b = 0; b < step; ++b) c -= basis.col(b).dot(c) * basis.col(b);
        double nrm = c.norm();
        if (nrm < 1e-12) continue;
        double gain = std::norm(c.dot(resid)) / (nrm * nrm);
        if (gain > best_gain) { best_gain = gain; best = j; }
      }
      if (best < 0) break;
      Eigen::VectorXcd c = codebook.ccols.col(best);
      for (int b = 0; b < step; ++b) c -= basis.col(b).dot(c) * basis.col(b);
      c.normalize();
      basis.col(step) = c;
      resid -= c.dot(resid) * c;
      chosen.push_back(static_cast<std::uint32_t>(best));
    }
    std::sort(chosen.begin(), chosen.end());
    return chosen;
  }
  // exact: enumerate K_a-subsets
  double log_count = num::log_binomial(M, ka);
  if (log_count > std::log(static_cast<double>(subset_cap))) {
    throw std::length_error("projection_decode: C(M, K_a) exceeds the cap");
  }
  std::vector<int> idx(ka);
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<std::uint32_t> best;
  double best_energy = -1.0;
  Eigen::MatrixXcd sub(codebook.n(), ka);
  while (true) {
    for (int j = 0; j < ka; ++j) sub.col(j) = codebook.ccols.col(idx[j]);
    double e = proj_energy(sub, y);
    if (e > best_energy) {
      best_energy = e;
      best.assign(idx.begin(), idx.end());
    }
    int j = ka - 1;
    while (j >= 0 && idx[j] == M - ka + j) --j;
    if (j < 0) break;
    ++idx[j];
    for (int j2 = j + 1; j2 < ka; ++j2) idx[j2] = idx[j2 - 1] + 1;
  }
  return best;
}

double beta_tail_bound_log(double x, int n, int ka, int t) {
  if (x < 0.0 || x > 1.0) throw std::domain_error("beta_tail_bound: x in [0,1]");
  if (x == 0.0) return kNegInf;
  const int d = n - ka;
  double v = num::log_binomial(d + t - 1.0, t - 1.0) + d * std::log(x);
  return std::min(0.0, v);
}

namespace {

struct GSamples {
  // per t (1..K_a), sorted ascending samples of the projection ratio G
  std::vector<std::vector<double>> g;
  int samples = 0;
};

GSamples sample_projection_ratios(const ch::SystemParams& p, double p_prime,
                                  int samples, RngStream rng) {
  const int n = p.n, ka = p.ka;
  GSamples out;
  out.g.assign(ka + 1, {});
  out.samples = samples;
  const double s = std::sqrt(p_prime);
  Eigen::MatrixXcd X(n, ka);
  Eigen::VectorXcd y(n);
  for (int it = 0; it < samples; ++it) {
    for (int j = 0; j < ka; ++j)
      for (int i = 0; i < n; ++i) X(i, j) = s * rng.next_cgaussian();
    Eigen::VectorXcd h(ka);
    for (int j = 0; j < ka; ++j) h(j) = rng.next_cgaussian();
    y.setZero();
    for (int j = 0; j < ka; ++j) y += h(j) * X.col(j);
    for (int i = 0; i < n; ++i) y(i) += rng.next_cgaussian();

    // order users by received energy, strongest first
    std::vector<int> order(ka);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> energy(ka);
    for (int j = 0; j < ka; ++j)
      energy[j] = std::norm(h(j)) * X.col(j).squaredNorm();
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return energy[a] > energy[b]; });

    // modified Gram-Schmidt with one re-orthogonalization pass; prefix j
    // spans the j strongest users
    Eigen::MatrixXcd Qb(n, ka);
    std::vector<double> proj_prefix(ka + 1, 0.0);
    int rank = 0;
    for (int j = 0; j < ka; ++j) {
      Eigen::VectorXcd c = X.col(order[j]);
      for (int pass = 0; pass < 2; ++pass) {
        for (int b = 0; b < rank; ++b) c -= Qb.col(b).dot(c) * Qb.col(b);
      }
      double nrm = c.norm();
      proj_prefix[j + 1] = proj_prefix[j];
      if (nrm > 1e-10) {
        c /= nrm;
        Qb.col(rank) = c;
        ++rank;
        proj_prefix[j + 1] += std::norm(c.dot(y));
      }
    }
    const double ynorm2 = y.squaredNorm();
    const double num_full = ynorm2 - proj_prefix[ka];  // ||y||^2 - ||P_T y||^2
    for (int t = 1; t <= ka; ++t) {
      double den = ynorm2 - proj_prefix[ka - t];  // C = strongest K_a - t
      double g = den > 0 ? num_full / den : 1.0;
      out.g[t].push_back(g);
    }
  }
  for (int t = 1; t <= ka; ++t) std::sort(out.g[t].begin(), out.g[t].end());
  return out;
}

double tail_fraction(const std::vector<double>& sorted, double threshold) {
  auto it = std::lower_bound(sorted.begin(), sorted.end(), threshold);
  return static_cast<double>(sorted.end() - it) / sorted.size();
}

}  // namespace

SisoAchResult siso_pupe_at_power(const ch::SystemParams& params,
                                 const SisoAchOptions& opts) {
  const int n = params.n, ka = params.ka;
  if (ka >= n) throw std::invalid_argument("siso: K_a < n required");
  const double p_prime = params.power * opts.p_prime_ratio;
  GSamples gs = sample_projection_ratios(params, p_prime, opts.samples,
                                         RngStream(opts.seed, opts.stream));

  SisoAchResult res;
  res.samples = opts.samples;
  res.per_t.assign(ka + 1, 0.0);
  res.delta.assign(ka + 1, 0.0);
  double log_pupe = kNegInf;
  double var_sum = 0.0;
  const double d = n - ka;
  for (int t = 1; t <= ka; ++t) {
    const double log_c2 = num::log_binomial(ka, t);
    const double r1 = num::log_binomial_pow2(params.k, ka, t) / d;
    const double s_t = num::log_binomial(d + t - 1.0, t - 1.0) / d;
    auto objective = [&](const std::vector<double>& x) {
      const double delta = x[0];
      const double v = std::exp(-(delta + r1 + s_t));
      const double mc = tail_fraction(gs.g[t], v);
      return log_sum_exp(log_c2 - d * delta,
                         mc > 0 ? std::log(mc) : std::log(0.5 / gs.samples));
    };
    num::OptBox box;
    box.names = {"delta"};
    box.lo = {0.0};
    box.hi = {std::max(2.0, 4.0 * (log_c2 + 10.0) / d)};
    auto opt = num::minimize_box(objective, box, 200);
    double log_pt = std::min(0.0, opt.min);
    res.per_t[t] = std::exp(log_pt);
    res.delta[t] = opt.argmin[0];
    log_pupe = log_sum_exp(log_pupe,
                           std::log(static_cast<double>(t) / ka) + log_pt);
    // binomial SE of the dominant MC component
    const double v = std::exp(-(res.delta[t] + r1 + s_t));
    const double mc = tail_fraction(gs.g[t], v);
    const double se = std::sqrt(mc * (1.0 - mc) / gs.samples);
    var_sum += std::pow(static_cast<double>(t) / ka * se, 2);
  }
  // p0 (complex variant: energy is P'/2 chi^2_{2n})
  double log_p0 = kNegInf;
  if (ka >= 2) log_p0 = num::log_binomial(ka, 2) - params.k * num::kLn2;
  log_p0 = log_sum_exp(log_p0, std::log(static_cast<double>(ka)) +
                                   num::log_chi2_tail(
                                       2.0 * n, 2.0 * n / opts.p_prime_ratio));
  log_pupe = log_sum_exp(log_pupe, log_p0);
  res.pupe = std::exp(std::min(0.0, log_pupe));
  res.pupe_se = std::sqrt(var_sum);
  res.sample_starved = res.pupe_se > 0.1 * res.pupe;
  res.ebno_db = params.ebno_db();
  return res;
}

SisoAchResult siso_achievability(const ch::SystemParams& params,
                                 const SisoAchOptions& opts) {
  ch::SystemParams p = params;
  p.field = ch::Field::complex;
  auto pupe_at = [&](double db) {
    p.power = ch::SystemParams::power_for_ebno_db(db, p.n, p.k, p.field);
    return siso_pupe_at_power(p, opts);
  };
  double lo = opts.bracket_lo_db, hi = opts.bracket_hi_db;
  if (pupe_at(hi).pupe > p.eps) {
    throw std::runtime_error("siso_achievability: infeasible at bracket top");
  }
  while (pupe_at(lo).pupe <= p.eps && lo > -10.0) lo -= 2.0;
  while (hi - lo > opts.tol_db) {
    double mid = 0.5 * (lo + hi);
    if (pupe_at(mid).pupe <= p.eps) hi = mid; else lo = mid;
  }
  SisoAchResult res = pupe_at(hi);
  res.ebno_db = hi;
  return res;
}

double log_noncentral_chi2_cdf(double y, int n2, double lambda) {
  if (y <= 0.0) return kNegInf;
  if (lambda <= 0.0) return num::log_gamma_p(0.5 * n2, 0.5 * y);
  // Poisson(lambda/2) mixture of central chi-square CDFs, summed outward
  // from the mode until both tails are negligible.
  const double half = 0.5 * lambda;
  const int mode = static_cast<int>(half);
  auto log_pois = [&](int j) {
    return -half + j * std::log(half) - std::lgamma(j + 1.0);
  };
  double total = kNegInf;
  const double tol = std::log(1e-18);
  for (int dir = 0; dir < 2; ++dir) {
    for (int step = dir == 0 ? 0 : 1;; ++step) {
      int j = dir == 0 ? mode + step : mode - step;
      if (j < 0) break;
      double term = log_pois(j) + num::log_gamma_p(0.5 * n2 + j, 0.5 * y);
      total = log_sum_exp(total, term);
      if (term < total + tol && step > 3) break;
    }
  }
  return std::min(0.0, total);
}

SisoConverseResult siso_converse(int n, double eps, int ka, double power,
                                 const SisoConverseOptions& opts) {
  if (!(eps > 0.0 && eps < 1.0)) {
    throw std::domain_error("siso_converse: eps in (0,1)");
  }
  RngStream rng(opts.seed, opts.stream);
  // gamma_n: empirical eps-quantile of S_n/n
  std::vector<double> sn(opts.quantile_samples);
  for (auto& v : sn) {
    double g = -std::log(1.0 - rng.next_double());  // Exp(1) fading gain
    double pg = power * g;
    double acc = n * std::log1p(pg);
    for (int i = 0; i < n; ++i) {
      std::complex<double> z = rng.next_cgaussian();
      acc += 1.0 - std::norm(std::sqrt(pg) * z - 1.0) / (1.0 + pg);
    }
    v = acc / n;
  }
  std::sort(sn.begin(), sn.end());
  const auto qidx = static_cast<std::size_t>(eps * (sn.size() - 1));
  SisoConverseResult res;
  res.gamma_n = sn[qidx];

  // Pr[L_n >= n gamma_n]; conditioned on the gain G the sum
  // sum |sqrt(PG) Z_i - sqrt(1+PG)|^2 is (PG/2) * ncchi2(2n, 2n(1+PG)/PG),
  // so the conditional tail is exact and only G is sampled (tilted).
  const double tau = opts.is_rate;
  double wsum = 0.0, wsq = 0.0;
  for (int it = 0; it < opts.tail_samples; ++it) {
    double g = -std::log(1.0 - rng.next_double()) / tau;  // Exp(tau)
    double w = std::exp(-(1.0 - tau) * g) / tau;          // dP/dQ
    double pg = power * g;
    double cond = 0.0;
    if (pg > 0) {
      double x = n * (1.0 + std::log1p(pg) - res.gamma_n);
      if (x > 0) {
        double y = 2.0 * x / pg;
        double lambda = 2.0 * n * (1.0 + pg) / pg;
        cond = std::exp(log_noncentral_chi2_cdf(y, 2 * n, lambda));
      }
    }
    double val = w * cond;
    wsum += val;
    wsq += val * val;
  }
  res.samples = opts.tail_samples;
  res.tail_estimate = wsum / opts.tail_samples;
  double var = wsq / opts.tail_samples - res.tail_estimate * res.tail_estimate;
  res.tail_se = std::sqrt(std::max(0.0, var) / opts.tail_samples);
  res.sample_starved =
      res.tail_estimate <= 0.0 || res.tail_se > 0.1 * res.tail_estimate;
  const double tail = std::max(res.tail_estimate, 1e-300);
  res.log2m_max = std::log2(static_cast<double>(ka)) - std::log2(tail);
  return res;
}

}  // namespace ura::fading
