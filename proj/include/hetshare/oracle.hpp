#pragma once

#include <vector>

#include "hetshare/pf_solver.hpp"

namespace hetshare {

// Grid resolution for the exhaustive search.  `step` is the granularity the
// reported argmax is refined to (a final local pass runs at step/100).
struct GridSpec {
  double step = 0.0;
  double capacity = 0.0;
};

struct GridSearchResult {
  std::vector<double> rates;  // in problem entry order
  double objective = 0.0;
};

// Independent brute-force maximizer of sum_i ln U_i(r_i + offset_i) over the
// simplex sum_i r_i = capacity (the constraint binds at any optimum because
// every ln U_i is strictly increasing).  Supports at most 4 users; intended
// as a correctness oracle for allocate(), not as a solver.
GridSearchResult grid_search_allocate(const AllocationProblem& problem, const GridSpec& grid);

}  // namespace hetshare
