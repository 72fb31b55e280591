#include "ura/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ura::num {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Evaluator {
  const std::function<double(const std::vector<double>&)>& f;
  const OptBox& box;
  std::size_t evals = 0;

  double operator()(const std::vector<double>& x) {
    ++evals;
    if (!box.is_feasible(x)) return kInf;
    double v = f(x);
    if (std::isnan(v)) return kInf;
    return v;
  }
};

// Fractional parts of sqrt(prime) give a well-spread Kronecker lattice.
const double kAlphas[] = {0.41421356237309515, 0.7320508075688772,
                          0.23606797749978969, 0.6457513110645907,
                          0.3166247903553998,  0.60555127546398929,
                          0.12310562561766059, 0.35889894354067355,
                          0.79583152331271954, 0.38516480713450403};

std::vector<double> clamp_to_box(std::vector<double> x, const OptBox& box) {
  for (std::size_t j = 0; j < box.dim(); ++j) {
    x[j] = std::min(box.hi[j], std::max(box.lo[j], x[j]));
  }
  return x;
}

// Standard Nelder-Mead restricted to the box (points clamped).
void nelder_mead(Evaluator& ev, const OptBox& box, std::vector<double> start,
                 double start_val, std::size_t budget,
                 std::vector<double>& best_x, double& best_v) {
  const std::size_t d = box.dim();
  if (d == 0 || budget < 2 * (d + 1)) {
    if (start_val < best_v) { best_v = start_val; best_x = start; }
    return;
  }
  std::vector<std::vector<double>> simplex(d + 1, start);
  std::vector<double> fv(d + 1);
  fv[0] = start_val;
  for (std::size_t j = 0; j < d; ++j) {
    double span = box.hi[j] - box.lo[j];
    double step = 0.05 * span;
    auto& p = simplex[j + 1];
    p[j] = (p[j] + step <= box.hi[j]) ? p[j] + step : p[j] - step;
    fv[j + 1] = ev(p);
  }
  std::size_t used = d;
  while (used + 2 < budget) {
    // order
    std::vector<std::size_t> idx(d + 1);
    for (std::size_t i = 0; i <= d; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    std::vector<std::vector<double>> s2(d + 1);
    std::vector<double> f2(d + 1);
    for (std::size_t i = 0; i <= d; ++i) { s2[i] = simplex[idx[i]]; f2[i] = fv[idx[i]]; }
    simplex.swap(s2); fv.swap(f2);

    if (fv[0] < best_v && std::isfinite(fv[0])) { best_v = fv[0]; best_x = simplex[0]; }
    double spread = std::abs(fv[d] - fv[0]);
    if (spread < 1e-14 * (1.0 + std::abs(fv[0]))) break;

    std::vector<double> centroid(d, 0.0);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) centroid[j] += simplex[i][j] / d;

    auto affine = [&](double t) {
      std::vector<double> x(d);
      for (std::size_t j = 0; j < d; ++j)
        x[j] = centroid[j] + t * (simplex[d][j] - centroid[j]);
      return clamp_to_box(std::move(x), box);
    };

    std::vector<double> xr = affine(-1.0);
    double fr = ev(xr); ++used;
    if (fr < fv[0]) {
      std::vector<double> xe = affine(-2.0);
      double fe = ev(xe); ++used;
      if (fe < fr) { simplex[d] = xe; fv[d] = fe; }
      else { simplex[d] = xr; fv[d] = fr; }
    } else if (fr < fv[d - 1]) {
      simplex[d] = xr; fv[d] = fr;
    } else {
      std::vector<double> xc = affine(0.5);
      double fc = ev(xc); ++used;
      if (fc < fv[d]) { simplex[d] = xc; fv[d] = fc; }
      else {
        // shrink toward best
        for (std::size_t i = 1; i <= d; ++i) {
          for (std::size_t j = 0; j < d; ++j)
            simplex[i][j] = simplex[0][j] + 0.5 * (simplex[i][j] - simplex[0][j]);
          fv[i] = ev(simplex[i]);
        }
        used += d;
      }
    }
  }
  for (std::size_t i = 0; i <= d; ++i) {
    if (fv[i] < best_v && std::isfinite(fv[i])) { best_v = fv[i]; best_x = simplex[i]; }
  }
}

OptResult run(const std::function<double(const std::vector<double>&)>& f,
              const OptBox& box, std::size_t budget,
              const std::vector<std::vector<double>>& seeds) {
  if (box.lo.size() != box.hi.size()) {
    throw std::invalid_argument("minimize_box: lo/hi size mismatch");
  }
  const std::size_t d = box.dim();
  Evaluator ev{f, box};

  double best_v = kInf;
  std::vector<double> best_x;

  struct Cand { double v; std::vector<double> x; };
  std::vector<Cand> top;

  auto consider = [&](std::vector<double> x) {
    double v = ev(x);
    if (!std::isfinite(v)) return;
    top.push_back({v, x});
    std::sort(top.begin(), top.end(), [](const Cand& a, const Cand& b) { return a.v < b.v; });
    if (top.size() > 3) top.pop_back();
    if (v < best_v) { best_v = v; best_x = std::move(x); }
  };

  for (const auto& s : seeds) consider(clamp_to_box(s, box));

  std::size_t grid_n = std::max<std::size_t>(d == 0 ? 1 : 2 * d + 1, budget / 2);
  if (d == 0) {
    std::vector<double> x;
    double v = ev(x);
    if (!std::isfinite(v)) throw std::runtime_error("minimize_box: infeasible");
    return {x, v, ev.evals};
  }
  for (std::size_t i = 0; i < grid_n; ++i) {
    std::vector<double> x(d);
    for (std::size_t j = 0; j < d; ++j) {
      double u = std::fmod((i + 0.5) * kAlphas[j % 10] + 0.123 * (j + 1), 1.0);
      x[j] = box.lo[j] + u * (box.hi[j] - box.lo[j]);
    }
    consider(std::move(x));
  }

  if (top.empty()) {
    throw std::runtime_error("minimize_box: no feasible point in the box");
  }

  std::size_t polish = budget > ev.evals ? (budget - ev.evals) : 0;
  std::size_t starts = std::min<std::size_t>(3, top.size());
  for (std::size_t s = 0; s < starts && polish > 0; ++s) {
    std::size_t share = polish / (starts - s);
    nelder_mead(ev, box, top[s].x, top[s].v, share, best_x, best_v);
    polish = budget > ev.evals ? (budget - ev.evals) : 0;
  }

  if (!box.is_feasible(best_x)) {
    throw std::runtime_error("minimize_box: optimizer returned infeasible point");
  }
  return {best_x, best_v, ev.evals};
}

}  // namespace

OptResult minimize_box(const std::function<double(const std::vector<double>&)>& f,
                       const OptBox& box, std::size_t budget) {
  return run(f, box, budget, {});
}

OptResult minimize_box_seeded(
    const std::function<double(const std::vector<double>&)>& f,
    const OptBox& box, std::size_t budget,
    const std::vector<std::vector<double>>& seeds) {
  return run(f, box, budget, seeds);
}

double bisect_threshold(const std::function<bool(double)>& pred, double lo,
                        double hi, double tol) {
  if (pred(lo)) return lo;
  if (!pred(hi)) return hi;
  while (hi - lo > tol) {
    double mid = 0.5 * (lo + hi);
    if (pred(mid)) hi = mid; else lo = mid;
  }
  return hi;
}

}  // namespace ura::num
