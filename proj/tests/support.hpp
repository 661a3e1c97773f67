#pragma once

// Shared helpers for the unit and acceptance suites: deterministic random
// utilities/problems and independent oracles used to check the closed forms.

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "hetshare/pf_solver.hpp"
#include "hetshare/utility.hpp"

namespace testsupport {

inline std::mt19937_64 make_rng(std::uint64_t seed) { return std::mt19937_64{seed}; }

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Random utility over the full property-test parameter ranges.
inline hetshare::UtilityFunction random_utility_wide(std::mt19937_64& rng) {
  if (std::uniform_int_distribution<int>(0, 1)(rng) == 0) {
    return hetshare::UtilityFunction::sigmoidal(uniform(rng, 0.1, 10.0),
                                                uniform(rng, 1.0, 100.0));
  }
  return hetshare::UtilityFunction::logarithmic(uniform(rng, 0.1, 20.0),
                                                uniform(rng, 10.0, 1000.0));
}

// Random utility drawn from the bundled scenario's parameter ranges.
inline hetshare::UtilityFunction random_utility_scenario(std::mt19937_64& rng) {
  if (std::uniform_int_distribution<int>(0, 1)(rng) == 0) {
    return hetshare::UtilityFunction::sigmoidal(uniform(rng, 1.0, 5.0),
                                                uniform(rng, 10.0, 30.0));
  }
  return hetshare::UtilityFunction::logarithmic(uniform(rng, 0.5, 15.0), 100.0);
}

inline hetshare::AllocationProblem random_problem(std::mt19937_64& rng, int users,
                                                  double capacity, double max_offset = 0.0) {
  hetshare::AllocationProblem problem;
  problem.capacity = capacity;
  for (int i = 0; i < users; ++i) {
    double offset = max_offset > 0.0 ? uniform(rng, 0.0, max_offset) : 0.0;
    problem.entries.push_back(
        {"u" + std::to_string(i + 1), random_utility_scenario(rng), offset});
  }
  return problem;
}

// Central finite difference of log_utility; the independent check on the
// analytic d_log_utility.
inline double finite_difference_d_log(const hetshare::UtilityFunction& utility, double rate) {
  const double h = 1e-6 * std::max(1.0, rate);
  return (utility.log_utility(rate + h) - utility.log_utility(rate - h)) / (2.0 * h);
}

// A steep sigmoid's log-derivative is flat to near the last double bit across
// the band where both exponential tails are below ~e^{-21}; rates there have
// no price inverse recoverable to 1e-6 in double precision.
inline bool in_flat_derivative_band(const hetshare::UtilityFunction& utility, double rate) {
  const auto* s = std::get_if<hetshare::Sigmoidal>(&utility.params());
  if (s == nullptr) return false;
  return s->steepness * rate > 21.0 && s->steepness * (s->midpoint - rate) > 21.0;
}

// Random rate in [lo, hi] outside the flat-derivative band, drawn directly
// from the non-flat segments on either side of it.
inline double invertible_rate(const hetshare::UtilityFunction& utility, std::mt19937_64& rng,
                              double lo, double hi) {
  const auto* s = std::get_if<hetshare::Sigmoidal>(&utility.params());
  if (s == nullptr) return uniform(rng, lo, hi);
  const double band = 21.0 / s->steepness;
  const double left_hi = std::min(hi, band);
  const double right_lo = std::max(lo, s->midpoint - band);
  const bool left_ok = left_hi > lo;
  const bool right_ok = right_lo < hi;
  if (left_ok && right_ok) {
    return std::uniform_int_distribution<int>(0, 1)(rng) == 0 ? uniform(rng, lo, left_hi)
                                                              : uniform(rng, right_lo, hi);
  }
  if (left_ok) return uniform(rng, lo, left_hi);
  if (right_ok) return uniform(rng, right_lo, hi);
  return uniform(rng, lo, hi);  // no flat band intersects [lo, hi]
}

// Monotone bisection inversion of evaluate(); the independent check on the
// closed-form min_rate_for_utility.
inline double bisect_rate_for_utility(const hetshare::UtilityFunction& utility, double target) {
  double lo = 0.0;
  double hi = 1.0;
  while (utility.evaluate(hi) < target) hi *= 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-13 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (utility.evaluate(mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

inline double objective_of(const hetshare::AllocationProblem& problem,
                           const std::vector<double>& rates) {
  double sum = 0.0;
  for (std::size_t i = 0; i < problem.entries.size(); ++i) {
    sum += problem.entries[i].utility.log_utility(rates[i] + problem.entries[i].offset);
  }
  return sum;
}

}  // namespace testsupport
