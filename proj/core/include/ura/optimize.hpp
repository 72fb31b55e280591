#ifndef URA_OPTIMIZE_HPP
#define URA_OPTIMIZE_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace ura::num {

/// Box constraints plus an optional feasibility predicate (e.g. the
/// positive-definiteness wall of a Chernoff exponent).
struct OptBox {
  std::vector<std::string> names;
  std::vector<double> lo;
  std::vector<double> hi;
  std::function<bool(const std::vector<double>&)> feasible;  // may be empty

  std::size_t dim() const { return lo.size(); }
  bool is_feasible(const std::vector<double>& x) const {
    return !feasible || feasible(x);
  }
};

struct OptResult {
  std::vector<double> argmin;
  double min = 0.0;
  std::size_t evals = 0;
};

/// Deterministic grid-then-polish minimizer.
///
/// Phase 1 spends budget/2 evaluations on a Kronecker (golden-ratio style)
/// lattice over the box; phase 2 runs Nelder-Mead polishes seeded from the
/// best three lattice points, sharing the remaining budget.  Infeasible
/// points (predicate false, or objective NaN/+inf) never win; the returned
/// point re-checks the predicate.  Throws std::runtime_error when every
/// probed point is infeasible.
OptResult minimize_box(const std::function<double(const std::vector<double>&)>& f,
                       const OptBox& box, std::size_t budget);

/// Same but seeded with extra initial points (warm starts) tried before the
/// lattice; useful when re-solving a slowly varying family of problems.
OptResult minimize_box_seeded(
    const std::function<double(const std::vector<double>&)>& f,
    const OptBox& box, std::size_t budget,
    const std::vector<std::vector<double>>& seeds);

/// Smallest x in [lo, hi] with pred(x) true, assuming pred is monotone
/// (false..false true..true).  Returns hi when pred(hi) is false.
double bisect_threshold(const std::function<bool(double)>& pred, double lo,
                        double hi, double tol);

}  // namespace ura::num

#endif  // URA_OPTIMIZE_HPP
