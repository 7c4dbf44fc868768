#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "capkm/instance.hpp"
#include "capkm/simplex.hpp"

namespace capkm {

// Extreme-point optimum of the standard relaxation:
//   min  sum d(i,j) x_ij + sum f_i y_i
//   s.t. sum_i x_ij = 1            for every client j
//        x_ij <= y_i
//        sum_j x_ij <= u_i y_i
//        sum_i y_i <= k,  0 <= y <= 1,  x >= 0
struct FractionalSolution {
  std::vector<std::vector<Rat>> x;  // m x n
  std::vector<Rat> y;               // m
  Rat value;
  long pivots = 0;

  Rat connection_cost(const Instance& inst) const;
  Rat opening_cost(const Instance& inst) const;
  // per-facility served demand sum_j x_ij
  Rat served(int i) const;
};

struct CkflLpResult {
  bool feasible = false;
  std::string certificate;  // set when infeasible
  FractionalSolution sol;
};

CkflLpResult solve_ckfl_lp(const Instance& inst, const SimplexOptions& opt = {});

// Debug dump of the relaxation in LP text exchange format (coefficients
// printed as exact decimals are rounded at 17 significant digits).
void dump_ckfl_lp(const Instance& inst, std::ostream& out);

// A star: one bundle center with its facility set, collected demand w,
// and budgets b = b_f + b_c (defined by the bundling module).
struct StarInstance {
  int center = -1;           // client index
  std::vector<int> fac;      // facility indices, ascending
  Rat w = 0;                 // demand the transport moves onto the center
  Rat b_f = 0, b_c = 0;      // opening / connection budget parts
  Rat vol_f = 0;             // sum of y*_i over fac (bundle volume)
  Rat b() const { return b_f + b_c; }
};

// Feasible star solution z_i = served_i / u_i (never exceeds y*_i).
std::vector<Rat> star_initial_solution(const Instance& inst, const FractionalSolution& frac,
                                       const StarInstance& star);

struct StarExtreme {
  std::vector<Rat> z;       // extreme point minimizing volume, <= 2 fractional
  std::vector<Rat> demand;  // d_i <= z_i * u_i, sums to w
};

// Volume-minimal extreme point of the star polytope
//   sum u_i z_i >= w,  sum (f_i + d(i,c) u_i) z_i <= b,  0 <= z <= 1
// plus a demand distribution re-derived greedily by distance.
StarExtreme star_extreme_point(const Instance& inst, const StarInstance& star,
                               const SimplexOptions& opt = {});

// Uniform capacities only: greedy transfer onto facilities minimizing
// d(i,c)*u + f_i. Volume preserved, at most one fractional entry, all three
// star constraints preserved.
std::vector<Rat> star_almost_integral(const Instance& inst, const StarInstance& star,
                                      const std::vector<Rat>& z);

// Demand distribution for a given star solution: fill facilities by
// ascending distance to the center up to z_i * u_i each.
std::vector<Rat> star_demand_distribution(const Instance& inst, const StarInstance& star,
                                          const std::vector<Rat>& z);

}  // namespace capkm
