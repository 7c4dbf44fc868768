#include <vector>

#include "doctest.h"

#include "capkm/ckm_nonuniform.hpp"
#include "capkm/oracle.hpp"
#include "test_util.hpp"

using namespace capkm;
using testutil::FacSpec;
using testutil::make_line;
using testutil::random_instance;

namespace {

Rat stated_cost_factor(const Rat& eps, int ell) {
  const Rat l = rat_ll(ell);
  return (Rat(4) * l + 1) * ((Rat(2) + Rat(4) / eps) * (Rat(1) + 2 * l) + (Rat(2) + 2 * l));
}

void check_result(const Instance& inst, const NonuniformResult& r, const Rat& eps, int ell) {
  const Rat gamma = Rat(3) + Rat(3) * eps;
  CHECK(r.gamma == gamma);
  const Rat factor = stated_cost_factor(eps, ell);
  const Rat bound = factor * r.lp_value;
  CHECK(r.cost_bound == bound);
  CHECK(r.stats.assignment_ok);
  CHECK(r.stats.max_violation <= gamma);
  CHECK(r.stats.total_cost <= bound);
  CHECK(r.witness_cost <= bound);
  CHECK(static_cast<long long>(r.sol.open.size()) <= inst.k);
  CHECK(r.stats.open_count == static_cast<int>(r.sol.open.size()));
  // stage costs reported and consistent
  CHECK(r.transport_cost >= 0);
  CHECK(r.flow_cost <= r.witness_cost);
  const VerifyResult v = verify_solution(inst, r.sol, gamma, bound);
  CHECK(v.ok);
}

}  // namespace

TEST_CASE("hand instance: one heavy facility must carry both clients") {
  const Instance inst = make_line({Rat(0), Rat(4)}, {{Rat(0), 2, Rat(0)}, {Rat(4), 1, Rat(0)}}, 1);
  const NonuniformResult r = solve_ckm_nonuniform(inst, Rat(1, 2), 2);
  CHECK(r.lp_value == 4);
  check_result(inst, r, Rat(1, 2), 2);
  // either facility serves both clients alone at cost 4
  REQUIRE(r.sol.open.size() == 1);
  CHECK(r.stats.total_cost == 4);
}

TEST_CASE("nonuniform pipeline holds its guarantees on random instances") {
  int t = 0;
  for (std::uint64_t seed : {61u, 62u, 63u, 64u, 65u, 66u}) {
    const Rat eps = t % 3 == 0 ? Rat(1, 4) : (t % 3 == 1 ? Rat(1, 2) : Rat(1));
    ++t;
    const Instance inst = random_instance(seed, 9, 4, 2);
    const NonuniformResult r = solve_ckm_nonuniform(inst, eps, 2);
    check_result(inst, r, eps, 2);
  }
}

TEST_CASE("larger ell changes the bundling but keeps the guarantees") {
  const Instance inst = random_instance(71, 10, 5, 3);
  for (int ell : {2, 3, 5}) {
    const NonuniformResult r = solve_ckm_nonuniform(inst, Rat(1, 2), ell);
    check_result(inst, r, Rat(1, 2), ell);
  }
}

TEST_CASE("the pipeline is deterministic") {
  const Instance inst = random_instance(73, 8, 4, 2);
  const NonuniformResult a = solve_ckm_nonuniform(inst, Rat(1, 2), 2);
  const NonuniformResult b = solve_ckm_nonuniform(inst, Rat(1, 2), 2);
  CHECK(a.sol.open == b.sol.open);
  CHECK(a.stats.total_cost == b.stats.total_cost);
  CHECK(a.witness_cost == b.witness_cost);
  CHECK(a.lp_pivots == b.lp_pivots);
}

TEST_CASE("input contract violations are rejected") {
  const Instance costs = make_line({Rat(0)}, {{Rat(0), 1, Rat(2)}}, 1);
  CHECK_THROWS_AS(solve_ckm_nonuniform(costs, Rat(1, 2), 2), ValidationError);

  const Instance ok = make_line({Rat(0)}, {{Rat(0), 1, Rat(0)}}, 1);
  CHECK_THROWS_AS(solve_ckm_nonuniform(ok, Rat(1, 2), 1), ValidationError);
  CHECK_THROWS_AS(solve_ckm_nonuniform(ok, Rat(0), 2), ValidationError);
  CHECK_THROWS_AS(solve_ckm_nonuniform(ok, Rat(-1, 2), 2), ValidationError);

  const Instance tight = make_line({Rat(0), Rat(1), Rat(2)}, {{Rat(0), 2, Rat(0)}}, 1);
  CHECK_THROWS_AS(solve_ckm_nonuniform(tight, Rat(1, 2), 2), ValidationError);
}

TEST_CASE("stage outputs satisfy their contracts") {
  const Instance inst = random_instance(79, 10, 5, 3);
  const Rat eps(1, 2);
  const int ell = 2;
  const CkflLpResult lp = solve_ckfl_lp(inst);
  REQUIRE(lp.feasible);
  const Bundling b = build_bundles(inst, lp.sol, ell);
  const TransportPlan plan = transport_to_centers(inst, lp.sol, b);

  std::vector<ConsolidatedStar> cons;
  for (const StarInstance& star : b.stars) {
    const StarExtreme ex = star_extreme_point(inst, star);
    const ConsolidatedStar cs = consolidate_star(inst, star, ex, eps);
    // consolidation leaves at most one fractional opening
    int fractional = 0;
    Rat dsum = 0, move = 0;
    for (std::size_t a = 0; a < star.fac.size(); ++a) {
      CHECK(cs.z[a] >= 0);
      CHECK(cs.z[a] <= 1);
      if (cs.z[a] > 0 && cs.z[a] < 1) ++fractional;
      CHECK(cs.demand[a] >= 0);
      const Rat room = cs.z[a] * rat_ll(inst.cap[star.fac[a]]);
      CHECK(cs.demand[a] <= room);
      dsum += cs.demand[a];
      move += cs.demand[a] * inst.dist_fc(star.fac[a], star.center);
    }
    CHECK(fractional <= 1);
    CHECK(dsum == star.w);
    CHECK(cs.move_cost == move);
    cons.push_back(cs);
  }

  const LeveledSolution lev = build_interval_solution(inst, lp.sol, b, plan, cons, eps);
  const Rat lo = Rat(ell - 1, ell);
  for (int i = 0; i < inst.m; ++i) {
    if (lev.y[i] == 0) {
      CHECK(lev.demand[i] == 0);
      continue;
    }
    CHECK(lev.y[i] >= lo);
    CHECK(lev.y[i] <= 1);
  }

  const SnappedSolution snap = snap_levels(inst, lev, ell, static_cast<int>(inst.k));
  Rat volume = 0;
  for (int i = 0; i < inst.m; ++i) {
    const Rat& yi = snap.y[i];
    const bool level_ok = yi == 0 || yi == lo || yi == 1;
    CHECK(level_ok);
    volume += yi;
  }
  CHECK(volume <= rat_ll(inst.k));
  for (int i : snap.n1) CHECK(snap.y[i] == 1);
  for (int i : snap.n2) CHECK(snap.y[i] == lo);
  CHECK(snap.n1.size() + snap.n2.size() <= static_cast<std::size_t>(inst.m));
  CHECK(snap.promoted >= 0);
}
