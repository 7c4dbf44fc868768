#pragma once

#include <cstdint>
#include <tuple>
#include <utility>
#include <vector>

#include "capkm/bundling.hpp"
#include "capkm/instance.hpp"
#include "capkm/lp.hpp"
#include "capkm/rational.hpp"
#include "capkm/simplex.hpp"

namespace capkm {

// Uniform-capacity pipelines. Bundle centers are linked into trees, star
// openings are made almost integral, and dependent rounding over the tree
// structure decides which facilities open. Demand then travels along tree
// edges only, which is what caps the violation at 6 (matching variant) or
// 2+3/(ell-1) (group variant).

// Nearest-neighbor in-forest over the center set. parent[c] == -1 at roots.
// Every 2-cycle of the nearest-neighbor map is broken by deleting the edge
// out of the lower-index node; longer cycles cannot occur under the
// (distance, index) tie-break.
struct ShortForest {
  std::vector<int> parent;
};

ShortForest short_trees(const Instance& inst, const std::vector<int>& centers);

// Node of a binary center tree. Indices refer to positions in
// bundles.centers. ds is the doubled distance to the short-tree father and
// is the edge metric for everything downstream; it only shrinks toward the
// root.
struct StarTreeNode {
  int father = -1;        // binary tree father
  int left = -1;          // sons after the binarization, left = smaller (ds, id)
  int right = -1;
  int short_father = -1;  // father before binarization
  Rat ds = 0;             // 2 * d(center, short father), 0 at roots
  bool big = false;       // bundle volume >= 1
  std::vector<Rat> z;     // almost integral opening, aligned with star.fac
  Rat vol = 0;            // sum of z
  Rat w = 0;              // star demand, copied from the bundle star
};

struct StarForest {
  Bundling bundles;
  std::vector<StarTreeNode> nodes;  // aligned with bundles.centers
  std::vector<int> roots;
};

// Short trees, binarization, and star openings in one pass. Openings start
// from served/u, are made almost integral by the greedy transfer, and a
// single-support fractional star is then padded up to min(1, bundle volume)
// so small stars always carry volume >= 1 - 1/ell.
StarForest build_star_forest(const Instance& inst, const FractionalSolution& frac,
                             Bundling bundles);

// Structural audit of every tree. Hard failures (exception): partition,
// almost integrality, volume floor, in-degrees, edge monotonicity, and the
// metric domination d <= ds. The reroute inequality
// (1-z_i)*u*ds <= 16*h*b_c and the star budget are proved under a saturated
// demand assumption the LP does not promise, so they abort only in strict
// mode and are counted otherwise.
struct TreeDiagnostics {
  int budget_fail = 0;   // star budget sum (f + d*u) z <= b
  int reroute_fail = 0;  // property (1-z)*u*ds <= 16*h*b_c over h-hop paths
};

TreeDiagnostics verify_star_tree(const Instance& inst, const StarForest& forest, bool strict);

// Matching on small-star nodes: big stars are deleted, and each fragment
// root j is matched with its left son, recursing so that no node is used
// twice. Pairs are (left son, node).
std::vector<std::pair<int, int>> make_matching(const StarForest& forest);

// Demand routing for the matching variant, separated from the solver so a
// rounding outcome can be injected. Closed small stars send their demand to
// the first open star among father, left brother, grandfather (just the
// left son for a closed root). Arrivals pool at the star and split equally
// over its open facilities.
struct Match6Routing {
  std::vector<int> dest;     // center -> serving center, -1 only for idle closed stars
  std::vector<int> hops;     // tree distance to dest
  std::vector<Rat> fac_load; // per facility
};

Match6Routing apply_match6(const Instance& inst, const StarForest& forest,
                           const std::vector<char>& fac_open);

// Groups of <= ell tree nodes, each stored as a chain in insertion order
// (group root first). A group that has child groups always has exactly ell
// nodes and at most ell+1 children; child group roots attach to the lowest
// chain vertex of the parent.
struct GroupedTree {
  std::vector<std::vector<int>> chains;  // per group, root first
  std::vector<int> parent_group;         // -1 for the group holding a tree root
  std::vector<int> group_of;             // node -> group
};

GroupedTree build_groups(const StarForest& forest, int ell);

// Bottom-up demand sweep for the group variant: within each chain demand is
// pooled upward first-come-first-served into open facilities capped at
// gamma*u, big stars serve themselves first, and whatever survives the
// chain root moves to the parent group. A closed small star at a tree root
// trades places with its unique son before the sweep; the paired rounding
// of those two entries keeps one of them open.
struct GroupRouting {
  std::vector<std::tuple<int, int, Rat>> moves;  // (source center, facility, amount)
  std::vector<Rat> fac_load;                     // per facility
  std::vector<Rat> forwarded;                    // per group, amount pushed to the parent
};

GroupRouting route_groups(const Instance& inst, const StarForest& forest,
                          const GroupedTree& groups, const std::vector<char>& fac_open,
                          const Rat& gamma);

struct UniformResult {
  IntegralSolution sol;
  SolutionStats stats;
  Rat lp_value = 0;
  Rat gamma = 0;         // 6, or 2+3/(ell-1)
  Rat cost_bound = 0;    // 196 * lp, or (32 ell^2 + 28 ell + 7) * lp
  Rat witness_cost = 0;  // constructive routing cost before the final flow
  Rat transport_cost = 0;  // stage costs, for reports
  Rat routing_cost = 0;    // witness connection cost after the star routing
  Rat flow_cost = 0;
  int centers = 0;
  int trees = 0;
  int matched_pairs = 0;  // matching variant
  int groups = 0;         // group variant
  int budget_diag = 0;    // non-strict tree diagnostics, see verify_star_tree
  int reroute_diag = 0;
  long long lp_pivots = 0;
};

// Matching-based (196, 6) algorithm. Uniform capacities, ell fixed to 2.
UniformResult solve_kfl_match6(const Instance& inst, std::uint64_t seed,
                               const SimplexOptions& opt = {});

// Group algorithm with violation 2+3/(ell-1) and cost 32 ell^2 + 28 ell + 7
// times the LP value. Uniform capacities, ell >= 2.
UniformResult solve_kfl_group(const Instance& inst, int ell, std::uint64_t seed,
                              const SimplexOptions& opt = {});

}  // namespace capkm
