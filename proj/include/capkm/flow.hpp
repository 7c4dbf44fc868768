#pragma once

#include <utility>
#include <vector>

#include "capkm/rational.hpp"

namespace capkm {

// Exact min-cost flow: successive shortest augmenting paths with node
// potentials. Capacities are arbitrary-precision integers, costs exact
// rationals. All arc costs must be nonnegative (true for metric distances),
// so initial potentials are zero.
class MinCostFlow {
 public:
  explicit MinCostFlow(int nodes) : head_(nodes, -1) {}

  // Returns the arc id; flow_on(id) reads the shipped amount after solve().
  int add_arc(int from, int to, Int cap, Rat cost);

  // Ships up to `want` units from s to t.
  // Returns (value shipped, total cost of that flow).
  std::pair<Int, Rat> solve(int s, int t, const Int& want);

  Int flow_on(int arc_id) const { return arcs_[2 * arc_id].initial_cap - arcs_[2 * arc_id].cap; }

 private:
  struct Arc {
    int to;
    int next;  // next arc id out of the same node, -1 terminates
    Int cap;
    Int initial_cap;
    Rat cost;
  };
  std::vector<Arc> arcs_;
  std::vector<int> head_;
};

}  // namespace capkm
