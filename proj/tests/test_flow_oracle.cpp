#include <vector>

#include "doctest.h"

#include "capkm/flow.hpp"
#include "capkm/oracle.hpp"
#include "test_util.hpp"

using namespace capkm;
using testutil::FacSpec;
using testutil::make_line;
using testutil::random_instance;

namespace {

// Reference assignment cost: every unit of client demand picks a facility,
// loads capped at floor(gamma) * u (callers use integral gamma * u here).
Rat brute_assignment(const Instance& inst, const std::vector<int>& open,
                     const std::vector<long long>& caps, bool& feasible) {
  std::vector<int> pick(inst.n, 0);
  const int choices = static_cast<int>(open.size());
  Rat best = 0;
  bool found = false;
  while (true) {
    std::vector<long long> load(choices, 0);
    Rat cost = 0;
    bool ok = true;
    for (int j = 0; j < inst.n && ok; ++j) {
      const int i = open[pick[j]];
      if (++load[pick[j]] > caps[pick[j]]) ok = false;
      cost += inst.dist_fc(i, j);
    }
    if (ok && (!found || cost < best)) {
      best = cost;
      found = true;
    }
    int j = 0;
    while (j < inst.n && ++pick[j] == choices) pick[j++] = 0;
    if (j == inst.n) break;
  }
  feasible = found;
  return best;
}

}  // namespace

TEST_CASE("min-cost flow picks the cheap augmenting path first") {
  MinCostFlow f(4);
  const int s = 0, a = 1, b = 2, t = 3;
  f.add_arc(s, a, Int(1), Rat(0));
  const int top = f.add_arc(a, t, Int(1), Rat(5));
  f.add_arc(s, b, Int(1), Rat(0));
  const int bot = f.add_arc(b, t, Int(1), Rat(3));
  const auto [shipped, cost] = f.solve(s, t, Int(2));
  CHECK(shipped == 2);
  CHECK(cost == 8);
  CHECK(f.flow_on(top) == 1);
  CHECK(f.flow_on(bot) == 1);
}

TEST_CASE("flow ships what it can when demand exceeds capacity") {
  MinCostFlow f(2);
  f.add_arc(0, 1, Int(2), Rat(1));
  const auto [shipped, cost] = f.solve(0, 1, Int(5));
  CHECK(shipped == 2);
  CHECK(cost == 2);
}

TEST_CASE("two-arc detour beats the expensive direct arc") {
  MinCostFlow f(3);
  f.add_arc(0, 2, Int(1), Rat(10));
  f.add_arc(0, 1, Int(1), Rat(0));
  f.add_arc(1, 2, Int(1), Rat(1));
  const auto [shipped, cost] = f.solve(0, 2, Int(2));
  CHECK(shipped == 2);
  CHECK(cost == 11);
}

TEST_CASE("assignment fills the near facility before the far one") {
  const Instance inst = make_line({Rat(0), Rat(1), Rat(2)},
                                  {{Rat(0), 2, Rat(0)}, {Rat(10), 2, Rat(0)}}, 2);
  const AssignmentResult r = min_cost_assignment(inst, {0, 1}, Rat(1));
  REQUIRE(r.feasible);
  CHECK(r.cost == 9);  // clients 0,1 on the near facility, client 2 travels 8
}

TEST_CASE("fractional gamma scales capacities exactly") {
  const Instance one = make_line({Rat(0), Rat(1)}, {{Rat(0), 1, Rat(0)}}, 1);
  CHECK_FALSE(min_cost_assignment(one, {0}, Rat(3, 2)).feasible);  // cap 1.5 < 2
  const AssignmentResult r = min_cost_assignment(one, {0}, Rat(2));
  REQUIRE(r.feasible);
  CHECK(r.cost == 1);

  // cap 3/2 per facility forces the middle client to split half and half
  const Instance split = make_line({Rat(0), Rat(4), Rat(2)},
                                   {{Rat(0), 1, Rat(0)}, {Rat(4), 1, Rat(0)}}, 2);
  const AssignmentResult half = min_cost_assignment(split, {0, 1}, Rat(3, 2));
  REQUIRE(half.feasible);
  CHECK(half.cost == 2);
  const Rat load0 = half.x[0][0] + half.x[0][1] + half.x[0][2];
  CHECK(load0 == Rat(3, 2));
}

TEST_CASE("assignment matches exhaustive enumeration on tiny instances") {
  for (std::uint64_t seed : {1u, 2u, 3u, 4u}) {
    const Instance inst = random_instance(seed, 5, 3, 3, 2);
    std::vector<int> open{0, 1, 2};
    const AssignmentResult r = min_cost_assignment(inst, open, Rat(1));
    bool bf_feasible = false;
    const Rat bf = brute_assignment(inst, open, {2, 2, 2}, bf_feasible);
    CHECK(r.feasible == bf_feasible);
    if (r.feasible) CHECK(r.cost == bf);
  }
}

TEST_CASE("exact optimum enumerates subsets with deterministic ties") {
  const Instance inst = make_line({Rat(0), Rat(1), Rat(2)},
                                  {{Rat(0), 2, Rat(0)}, {Rat(2), 2, Rat(0)}}, 2);
  const ExactOptResult r = exact_opt(inst, Rat(1));
  REQUIRE(r.feasible);
  CHECK(r.cost == 1);
  CHECK(r.open == std::vector<int>{0, 1});

  // both single facilities serve the lone client at cost 1; lexicographic
  // tie-break picks facility 0
  const Instance tie = make_line({Rat(1)}, {{Rat(0), 1, Rat(0)}, {Rat(2), 1, Rat(0)}}, 1);
  const ExactOptResult t = exact_opt(tie, Rat(1));
  REQUIRE(t.feasible);
  CHECK(t.cost == 1);
  CHECK(t.open == std::vector<int>{0});
}

TEST_CASE("opening costs steer the exact optimum") {
  // close facility is expensive to open, far one is free
  const Instance inst = make_line({Rat(0)}, {{Rat(0), 1, Rat(10)}, {Rat(3), 1, Rat(0)}}, 1);
  const ExactOptResult r = exact_opt(inst, Rat(1));
  REQUIRE(r.feasible);
  CHECK(r.cost == 3);
  CHECK(r.open == std::vector<int>{1});
}

TEST_CASE("infeasible capacity totals are reported") {
  const Instance inst = make_line({Rat(0), Rat(1), Rat(2)}, {{Rat(0), 2, Rat(0)}}, 1);
  CHECK_FALSE(exact_opt(inst, Rat(1)).feasible);
  CHECK(exact_opt(inst, Rat(3, 2)).feasible);  // cap 3 at gamma 3/2
}

TEST_CASE("oracle refuses oversized enumerations") {
  const Instance inst = random_instance(9, 4, 3, 2, 2);
  OracleOptions opt;
  opt.max_facilities = 2;
  CHECK_THROWS_AS(exact_opt(inst, Rat(1), opt), ValidationError);
}

TEST_CASE("parallel and serial enumeration agree") {
  for (std::uint64_t seed : {5u, 6u}) {
    const Instance inst = random_instance(seed, 6, 5, 3, 2);
    OracleOptions serial;
    serial.parallel = false;
    OracleOptions parallel;
    parallel.parallel = true;
    const ExactOptResult a = exact_opt(inst, Rat(1), serial);
    const ExactOptResult b = exact_opt(inst, Rat(1), parallel);
    CHECK(a.feasible == b.feasible);
    CHECK(a.cost == b.cost);
    CHECK(a.open == b.open);
  }
}

TEST_CASE("solution verification catches each defect") {
  const Instance inst = make_line({Rat(0), Rat(1)}, {{Rat(0), 1, Rat(0)}, {Rat(1), 1, Rat(0)}}, 2);
  IntegralSolution sol;
  sol.open = {0, 1};
  sol.x = {{Rat(1), Rat(0)}, {Rat(0), Rat(1)}};
  CHECK(verify_solution(inst, sol, Rat(1), Rat(0)).ok);

  SUBCASE("too many facilities") {
    const Instance tight = make_line({Rat(0), Rat(1)},
                                     {{Rat(0), 1, Rat(0)}, {Rat(1), 1, Rat(0)}}, 1);
    CHECK_FALSE(verify_solution(tight, sol, Rat(2), Rat(10)).ok);
  }
  SUBCASE("load above gamma u") {
    IntegralSolution bad;
    bad.open = {0};
    bad.x = {{Rat(1), Rat(1)}, {Rat(0), Rat(0)}};
    CHECK_FALSE(verify_solution(inst, bad, Rat(1), Rat(10)).ok);
    CHECK(verify_solution(inst, bad, Rat(2), Rat(10)).ok);
  }
  SUBCASE("support outside the open set") {
    IntegralSolution bad = sol;
    bad.open = {0};
    CHECK_FALSE(verify_solution(inst, bad, Rat(1), Rat(10)).ok);
  }
  SUBCASE("cost above the bound") {
    IntegralSolution costly;
    costly.open = {0, 1};
    costly.x = {{Rat(0), Rat(1)}, {Rat(1), Rat(0)}};  // crossed, cost 2
    CHECK_FALSE(verify_solution(inst, costly, Rat(1), Rat(1)).ok);
    CHECK(verify_solution(inst, costly, Rat(1), Rat(2)).ok);
  }
  SUBCASE("unserved demand") {
    IntegralSolution bad = sol;
    bad.x[1][1] = Rat(1, 2);
    CHECK_FALSE(verify_solution(inst, bad, Rat(1), Rat(10)).ok);
  }
}
