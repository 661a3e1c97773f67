#include "hetshare/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hetshare/errors.hpp"

namespace hetshare {

namespace {

constexpr int kMaxUsers = 4;

// Enumerates lattice points of the simplex sum r_i = capacity restricted to
// per-user boxes [lo_i, hi_i], at spacing h.  The first n-1 coordinates run
// over their boxes; the last is closed to land exactly on the simplex and
// checked against its box.  Keeps the best objective seen.
struct SimplexScan {
  const AllocationProblem& problem;
  std::vector<double> lo, hi;
  double h = 0.0;
  double capacity = 0.0;

  std::vector<double> best_rates;
  double best_objective = -std::numeric_limits<double>::infinity();

  void run() {
    std::vector<double> point(problem.entries.size(), 0.0);
    descend(0, 0.0, point);
  }

  void descend(std::size_t i, double used, std::vector<double>& point) {
    const std::size_t n = problem.entries.size();
    if (i == n - 1) {
      const double last = capacity - used;
      if (last < lo[i] - 1e-9 * capacity || last > hi[i] + 1e-9 * capacity) return;
      point[i] = std::clamp(last, lo[i], hi[i]);
      evaluate(point);
      return;
    }
    // Remaining coordinates need at least their lower bounds.
    double min_rest = 0.0;
    for (std::size_t j = i + 1; j < n; ++j) min_rest += lo[j];
    for (double r = lo[i]; r <= hi[i] + 0.5 * h; r += h) {
      if (used + r > capacity - min_rest + 1e-9 * capacity) break;
      point[i] = std::min(r, hi[i]);
      descend(i + 1, used + point[i], point);
    }
  }

  void evaluate(const std::vector<double>& point) {
    double objective = 0.0;
    for (std::size_t i = 0; i < point.size(); ++i) {
      objective += problem.entries[i].utility.log_utility(point[i] +
                                                          problem.entries[i].offset);
    }
    if (objective > best_objective) {
      best_objective = objective;
      best_rates = point;
    }
  }
};

// Largest per-axis point count that keeps a full-simplex pass around or
// below ~10^6 evaluations for the given user count.
int axis_budget(std::size_t n) {
  switch (n) {
    case 1:
      return 1;
    case 2:
      return 100000;
    case 3:
      return 1400;
    default:
      return 160;
  }
}

}  // namespace

GridSearchResult grid_search_allocate(const AllocationProblem& problem, const GridSpec& grid) {
  validate_problem(problem);
  const std::size_t n = problem.entries.size();
  if (n > kMaxUsers) {
    throw ValidationError("grid search supports at most 4 users, got " + std::to_string(n));
  }
  if (!(grid.step > 0.0) || !(grid.capacity > 0.0)) {
    throw ValidationError("grid spec: step and capacity must be > 0");
  }
  if (grid.capacity / grid.step > 1e7) {
    throw ValidationError("grid spec: capacity/step exceeds the search size guard");
  }
  const double capacity = grid.capacity;

  SimplexScan scan{problem, {}, {}, 0.0, capacity, {}, 0.0};
  scan.best_objective = -std::numeric_limits<double>::infinity();

  // Rates of offset-free users are floored at the current spacing during
  // enumeration, never at 0, since ln U(0) = -inf.
  const auto floor_for = [&](std::size_t i, double spacing) {
    return problem.entries[i].offset > 0.0 ? 0.0 : spacing;
  };

  // Coarse pass over the whole simplex.  When the requested step is finer
  // than the axis budget allows, start coarser and close the gap with
  // shrinking window passes before the final step/100 refinement.
  double h = std::max(grid.step, capacity / axis_budget(n));
  scan.h = h;
  scan.lo.assign(n, 0.0);
  scan.hi.assign(n, capacity);
  for (std::size_t i = 0; i < n; ++i) scan.lo[i] = floor_for(i, h);
  scan.run();

  while (h > grid.step) {
    const double h_next = std::max(grid.step, h / 8.0);
    for (std::size_t i = 0; i < n; ++i) {
      scan.lo[i] = std::max(scan.best_rates[i] - 2.0 * h, floor_for(i, h_next));
      scan.hi[i] = std::min(scan.best_rates[i] + 2.0 * h, capacity);
    }
    scan.h = h_next;
    scan.run();
    h = h_next;
  }

  // Final refinement at step/100 in a +/- step neighborhood of the argmax.
  const double fine = grid.step / 100.0;
  for (std::size_t i = 0; i < n; ++i) {
    scan.lo[i] = std::max(scan.best_rates[i] - grid.step, floor_for(i, fine));
    scan.hi[i] = std::min(scan.best_rates[i] + grid.step, capacity);
  }
  scan.h = fine;
  scan.run();

  return {scan.best_rates, scan.best_objective};
}

}  // namespace hetshare
