#pragma once

#include <vector>

#include "capkm/lp.hpp"

namespace capkm {

// Greedy center selection and the facility bundles around them.
//
// Centers are picked by ascending average connection distance d_av; picking
// j removes every client j' with d(j,j') <= 2*ell*d_av(j'). Facilities join
// the bundle of their nearest center. Exact guarantees audited here:
//   separation  d(j,j') > 2*ell*max(d_av) for distinct centers,
//   coverage    every client has a center within 2*ell*d_av of it,
//   volume      every bundle has y*-volume >= 1 - 1/ell,
//   budgets     sum_j b_j == opening + (1+2*ell)*connection cost of the LP.
struct Bundling {
  int ell = 2;
  std::vector<Rat> d_av;            // per client
  std::vector<int> centers;         // selection order, client indices
  std::vector<int> owner;           // facility -> index into centers
  std::vector<StarInstance> stars;  // aligned with centers
};

Bundling build_bundles(const Instance& inst, const FractionalSolution& frac, int ell);

// Moves every x*_ij' onto the center of i's bundle. Audited exactly:
//   d(j', center(i)) <= 2 d(i,j') + 2*ell*d_av(j') per pair,
//   total cost <= (2+2*ell) * LP connection cost,
//   collected demand at each center == its star's w.
struct TransportPlan {
  Rat total_cost = 0;
  std::vector<Rat> collected;           // per center
  std::vector<std::vector<Rat>> moved;  // centers x clients: mass of j' at center
};

TransportPlan transport_to_centers(const Instance& inst, const FractionalSolution& frac,
                                   const Bundling& b);

}  // namespace capkm
