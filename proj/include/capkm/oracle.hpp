#pragma once

#include <string>
#include <vector>

#include "capkm/instance.hpp"
#include "capkm/rational.hpp"

namespace capkm {

struct AssignmentResult {
  bool feasible = false;
  Rat cost = 0;                     // connection cost only
  std::vector<std::vector<Rat>> x;  // m x n assignment
};

// Min-cost transportation of the unit client demands to the open facilities,
// capacity gamma*u_i each. Non-integral gamma*u_i are handled by scaling all
// capacities and supplies by the common denominator; the result is integral
// whenever every gamma*u_i is.
AssignmentResult min_cost_assignment(const Instance& inst, const std::vector<int>& open,
                                     const Rat& gamma);

struct ExactOptResult {
  bool feasible = false;
  Rat cost = 0;  // connection + opening
  std::vector<int> open;
};

struct OracleOptions {
  int max_facilities = 20;  // refuse larger enumerations
  bool parallel = true;     // OpenMP over subsets; serial path is the reference
};

// Exhaustive optimum over all open sets of size <= k at capacity violation
// gamma. Deterministic tie-break: smaller cost, then fewer facilities, then
// lexicographically smallest open set.
ExactOptResult exact_opt(const Instance& inst, const Rat& gamma, const OracleOptions& opt = {});

struct VerifyResult {
  bool ok = false;
  std::string reason;  // empty when ok
  SolutionStats stats;
};

// Exact checks: |open| <= k, per-facility load <= gamma*u_i, unit demand
// conservation, assignment supported on open facilities, total cost <= bound.
VerifyResult verify_solution(const Instance& inst, const IntegralSolution& sol, const Rat& gamma,
                             const Rat& cost_bound);

}  // namespace capkm
