#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "hetshare/utility.hpp"

namespace hetshare {

// One user's slot in a single-cell allocation problem.  `offset` is the rate
// the user already holds from another carrier; the cell's allocation is added
// on top of it and the utility is evaluated at the aggregated rate.
struct ProblemEntry {
  std::string user_id;
  UtilityFunction utility;
  double offset = 0.0;
};

// Maximize sum_i ln U_i(r_i + offset_i) subject to sum_i r_i <= capacity and
// 0 <= r_i <= capacity.
struct AllocationProblem {
  std::vector<ProblemEntry> entries;
  double capacity = 0.0;
};

// Throws ValidationError unless capacity > 0, at least one entry, offsets are
// nonnegative and user ids are unique.
void validate_problem(const AllocationProblem& problem);

struct UserRate {
  std::string user_id;
  double rate = 0.0;
};

// Converged solver output for one cell.
struct CellAllocation {
  std::vector<UserRate> rates;  // in problem entry order
  double shadow_price = 0.0;
  double objective = 0.0;  // sum of ln U_i(r_i + offset_i)
  int iterations = 0;      // bisection steps on the shadow price
  double residual = 0.0;   // |sum r_i - capacity|

  // Rate for a given user; throws ValidationError if the id is unknown.
  double rate_of(std::string_view user_id) const;
};

// One step of the dual bisection, for convergence traces.
struct BisectionStep {
  int iteration = 0;
  double price_lo = 0.0;
  double price_hi = 0.0;
  double price_mid = 0.0;
  double excess_demand = 0.0;
};

struct SolverOptions {
  double capacity_tolerance_rel = 1e-6;  // |sum r - R| <= rel * R at the solution
  int max_iterations = 200;
  std::vector<BisectionStep>* trace = nullptr;  // optional; appended to
};

// Per-user rates demanded at a given shadow price:
//   r_i = clamp(rate_at_price(U_i, price) - offset_i, 0, capacity).
// Returned in entry order.  Each component is nonincreasing in price.
std::vector<double> demand_at_price(const AllocationProblem& problem, double price);

// Solves the cell's allocation by bisecting the shadow price on the monotone
// excess-demand function until |sum_i r_i(p) - capacity| falls below the
// capacity tolerance.  Deterministic: identical inputs give identical output.
// Throws SolverError when the price cannot be bracketed or the iteration cap
// is reached.
CellAllocation allocate(const AllocationProblem& problem, const SolverOptions& options = {});

}  // namespace hetshare
