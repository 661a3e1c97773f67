#include "hetshare/pf_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <unordered_set>

#include "hetshare/errors.hpp"

namespace hetshare {

void validate_problem(const AllocationProblem& problem) {
  if (!(problem.capacity > 0.0)) {
    throw ValidationError("allocation problem: capacity must be > 0");
  }
  if (problem.entries.empty()) {
    throw ValidationError("allocation problem: at least one entry required");
  }
  std::unordered_set<std::string> seen;
  for (const auto& entry : problem.entries) {
    if (!(entry.offset >= 0.0)) {
      throw ValidationError("allocation problem: offset of user '" + entry.user_id +
                            "' must be >= 0");
    }
    if (!seen.insert(entry.user_id).second) {
      throw ValidationError("allocation problem: duplicate user id '" + entry.user_id + "'");
    }
  }
}

double CellAllocation::rate_of(std::string_view user_id) const {
  for (const auto& ur : rates) {
    if (ur.user_id == user_id) return ur.rate;
  }
  throw ValidationError("no rate for user '" + std::string(user_id) + "'");
}

std::vector<double> demand_at_price(const AllocationProblem& problem, double price) {
  if (!(price > 0.0)) {
    throw DomainError("demand_at_price: price must be > 0");
  }
  std::vector<double> demands;
  demands.reserve(problem.entries.size());
  for (const auto& entry : problem.entries) {
    const double wanted = entry.utility.rate_at_price(price) - entry.offset;
    demands.push_back(std::clamp(wanted, 0.0, problem.capacity));
  }
  return demands;
}

namespace {

double total_demand(const AllocationProblem& problem, double price) {
  double sum = 0.0;
  for (double d : demand_at_price(problem, price)) sum += d;
  return sum;
}

std::string bracket_diagnostic(const AllocationProblem& problem, double p_lo, double p_hi) {
  std::ostringstream os;
  os << "price bounds [" << p_lo << ", " << p_hi << "], capacity " << problem.capacity
     << ", demands at bounds " << total_demand(problem, p_lo) << " / "
     << total_demand(problem, p_hi);
  return os.str();
}

CellAllocation assemble(const AllocationProblem& problem, double price,
                        const std::vector<double>& rates, int iterations) {
  CellAllocation result;
  result.shadow_price = price;
  result.iterations = iterations;
  double sum = 0.0;
  double objective = 0.0;
  result.rates.reserve(problem.entries.size());
  for (std::size_t i = 0; i < problem.entries.size(); ++i) {
    const auto& entry = problem.entries[i];
    result.rates.push_back({entry.user_id, rates[i]});
    sum += rates[i];
    objective += entry.utility.log_utility(rates[i] + entry.offset);
  }
  result.objective = objective;
  result.residual = std::abs(sum - problem.capacity);
  return result;
}

CellAllocation finish(const AllocationProblem& problem, double price, int iterations) {
  return assemble(problem, price, demand_at_price(problem, price), iterations);
}

// Terminal step once the price bracket is exhausted at floating-point
// resolution: interpolate between the demand vectors at the two ends so the
// rates sum to capacity exactly.  Every interpolated rate lies between two
// demands at prices one representable step apart, so stationarity holds to
// ulp scale; this also covers steep sigmoids whose flat log-derivative makes
// demand jump between adjacent prices.
CellAllocation finish_collapsed(const AllocationProblem& problem, double p_lo, double p_hi,
                                double tol, int iterations) {
  const std::vector<double> at_lo = demand_at_price(problem, p_lo);
  const std::vector<double> at_hi = demand_at_price(problem, p_hi);
  double sum_lo = 0.0;
  double sum_hi = 0.0;
  for (std::size_t i = 0; i < at_lo.size(); ++i) {
    sum_lo += at_lo[i];
    sum_hi += at_hi[i];
  }
  const double gap = sum_lo - sum_hi;
  if (!(gap > 0.0)) {
    throw SolverError("shadow price bracket collapsed without a demand gap: " +
                      bracket_diagnostic(problem, p_lo, p_hi));
  }
  const double theta = std::clamp((problem.capacity - sum_hi) / gap, 0.0, 1.0);
  std::vector<double> rates(at_lo.size());
  for (std::size_t i = 0; i < rates.size(); ++i) {
    rates[i] = at_hi[i] + theta * (at_lo[i] - at_hi[i]);
  }
  CellAllocation result = assemble(problem, p_hi, rates, iterations);
  if (result.residual > tol) {
    throw SolverError("capacity tolerance unreachable at floating-point resolution: " +
                      bracket_diagnostic(problem, p_lo, p_hi));
  }
  return result;
}

}  // namespace

// Dual search.  Excess demand sum_i r_i(p) - R is continuous and nonincreasing
// in p, strictly decreasing wherever some user is unclamped, so a sign-change
// bracket plus bisection is globally convergent.  The constraint always binds:
// demand grows without bound as p -> 0 (up to per-user capacity clamps).
CellAllocation allocate(const AllocationProblem& problem, const SolverOptions& options) {
  validate_problem(problem);
  const double capacity = problem.capacity;
  const double tol = options.capacity_tolerance_rel * capacity;
  const double eps = 1e-9 * capacity;

  const auto excess = [&](double price) { return total_demand(problem, price) - capacity; };

  // Upper bound: at the largest marginal price any user would pay for its
  // first sliver of rate, total demand is ~2n*eps, far below capacity.  The
  // derivative may underflow for deeply saturated offsets; floor the start.
  double p_hi = 0.0;
  for (const auto& entry : problem.entries) {
    p_hi = std::max(p_hi,
                    entry.utility.d_log_utility(std::max(entry.offset, eps) + eps));
  }
  p_hi = std::max(p_hi, 1e-12);
  double p_lo = 0.0;  // unknown until a positive-excess price is seen
  double excess_hi = excess(p_hi);
  if (std::abs(excess_hi) <= tol) return finish(problem, p_hi, 0);
  for (int i = 0; excess_hi > 0.0; ++i) {
    if (i >= 200) {
      throw SolverError("shadow price upper bound not found: " +
                        bracket_diagnostic(problem, p_hi / 2, p_hi));
    }
    p_lo = p_hi;  // positive excess: a valid lower bound
    p_hi *= 2.0;
    excess_hi = excess(p_hi);
    if (std::abs(excess_hi) <= tol) return finish(problem, p_hi, 0);
  }

  // Lower bound: demand must exceed capacity somewhere below.  Each failing
  // probe is itself an upper bound, so the final bracket ratio stays <= 2
  // even when the equilibrium price is hundreds of orders of magnitude down
  // (a steep sigmoid's derivative reaches ~e^{-700}).  A flat zero excess
  // (every user clamped at a bound) converges here immediately.
  if (p_lo == 0.0) {
    p_lo = std::min(1e-12, p_hi * 0.5);
    double excess_lo = excess(p_lo);
    if (std::abs(excess_lo) <= tol) return finish(problem, p_lo, 0);
    for (int i = 0; excess_lo < 0.0; ++i) {
      if (i >= 1200 || p_lo <= 1e-305) {
        throw SolverError("shadow price lower bound not found: " +
                          bracket_diagnostic(problem, p_lo, p_hi));
      }
      p_hi = p_lo;  // negative excess: a tighter upper bound
      p_lo *= 0.5;
      excess_lo = excess(p_lo);
      if (std::abs(excess_lo) <= tol) return finish(problem, p_lo, 0);
    }
  }

  // Bisect the price all the way to floating-point resolution, then close the
  // last gap by interpolating demands.  Stopping earlier, at the capacity
  // tolerance alone, leaves an objective gap of up to p* times the slack,
  // which the exhaustive oracle can see.
  constexpr double kUlpScale = 8.0 * std::numeric_limits<double>::epsilon();
  for (int iter = 1; iter <= options.max_iterations; ++iter) {
    if (p_hi - p_lo <= kUlpScale * p_hi) {
      return finish_collapsed(problem, p_lo, p_hi, tol, iter - 1);
    }
    const double p_mid = 0.5 * (p_lo + p_hi);
    const double e = excess(p_mid);
    if (options.trace != nullptr) {
      options.trace->push_back({iter, p_lo, p_hi, p_mid, e});
    }
    if (e > 0.0) {
      p_lo = p_mid;
    } else {
      p_hi = p_mid;
    }
  }
  throw SolverError("shadow price bisection did not converge within " +
                    std::to_string(options.max_iterations) + " iterations: " +
                    bracket_diagnostic(problem, p_lo, p_hi));
}

}  // namespace hetshare
