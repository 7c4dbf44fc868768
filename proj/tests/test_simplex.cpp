#include <vector>

#include "doctest.h"

#include "capkm/simplex.hpp"

using namespace capkm;

namespace {

LinearProgram beale() {
  // Classic cycling instance for Dantzig pricing; the optimum is -1/20.
  LinearProgram lp;
  const int x1 = lp.add_var(Rat(-3, 4));
  const int x2 = lp.add_var(Rat(150));
  const int x3 = lp.add_var(Rat(-1, 50));
  const int x4 = lp.add_var(Rat(6));
  lp.add_row({{x1, Rat(1, 4)}, {x2, Rat(-60)}, {x3, Rat(-1, 25)}, {x4, Rat(9)}}, '<', Rat(0));
  lp.add_row({{x1, Rat(1, 2)}, {x2, Rat(-90)}, {x3, Rat(-1, 50)}, {x4, Rat(3)}}, '<', Rat(0));
  lp.add_row({{x3, Rat(1)}}, '<', Rat(1));
  return lp;
}

}  // namespace

TEST_CASE("two-variable optimum on the simplex") {
  LinearProgram lp;
  const int x = lp.add_var(Rat(-1));
  const int y = lp.add_var(Rat(-1));
  lp.add_row({{x, Rat(1)}, {y, Rat(1)}}, '<', Rat(1));
  const LpResult r = solve_lp(lp);
  REQUIRE(r.status == LpStatus::Optimal);
  CHECK(r.value == -1);
  const Rat sum = r.x[0] + r.x[1];
  CHECK(sum == 1);
}

TEST_CASE("equality and lower-bound rows") {
  LinearProgram lp;
  const int x = lp.add_var(Rat(1));
  const int y = lp.add_var(Rat(2));
  lp.add_row({{x, Rat(1)}, {y, Rat(1)}}, '=', Rat(4));
  lp.add_row({{x, Rat(1)}}, '>', Rat(1));
  lp.add_row({{x, Rat(1)}}, '<', Rat(3));
  const LpResult r = solve_lp(lp);
  REQUIRE(r.status == LpStatus::Optimal);
  // push x as high as allowed, y picks up the rest
  CHECK(r.x[0] == 3);
  CHECK(r.x[1] == 1);
  CHECK(r.value == 5);
}

TEST_CASE("infeasible systems are detected") {
  LinearProgram lp;
  const int x = lp.add_var(Rat(0));
  lp.add_row({{x, Rat(1)}}, '>', Rat(2));
  lp.add_row({{x, Rat(1)}}, '<', Rat(1));
  CHECK(solve_lp(lp).status == LpStatus::Infeasible);
}

TEST_CASE("unbounded directions are detected") {
  LinearProgram lp;
  const int x = lp.add_var(Rat(-1));
  const int y = lp.add_var(Rat(0));
  lp.add_row({{x, Rat(1)}, {y, Rat(-1)}}, '<', Rat(1));
  CHECK(solve_lp(lp).status == LpStatus::Unbounded);
}

TEST_CASE("degenerate pivoting terminates at the optimum") {
  SimplexOptions opt;
  opt.stall_window = 1;  // force Bland's rule almost immediately
  const LpResult tight = solve_lp(beale(), opt);
  REQUIRE(tight.status == LpStatus::Optimal);
  CHECK(tight.value == Rat(-1, 20));

  const LpResult dantzig = solve_lp(beale());
  REQUIRE(dantzig.status == LpStatus::Optimal);
  CHECK(dantzig.value == Rat(-1, 20));
}

TEST_CASE("serial and parallel elimination agree bit for bit") {
  LinearProgram lp;
  // dense-ish system mixing all row kinds
  std::vector<int> v;
  for (int t = 0; t < 6; ++t) v.push_back(lp.add_var(Rat(t - 3)));
  lp.add_row({{v[0], Rat(2)}, {v[1], Rat(1)}, {v[2], Rat(1, 3)}}, '<', Rat(7));
  lp.add_row({{v[1], Rat(1)}, {v[3], Rat(-1)}, {v[4], Rat(2, 5)}}, '>', Rat(-2));
  lp.add_row({{v[2], Rat(1)}, {v[4], Rat(1)}, {v[5], Rat(1)}}, '=', Rat(3));
  lp.add_row({{v[0], Rat(1)}, {v[5], Rat(4)}}, '<', Rat(9));
  for (int t = 0; t < 6; ++t) lp.add_row({{v[t], Rat(1)}}, '<', Rat(5, 2));

  SimplexOptions serial;
  serial.threads = 1;
  SimplexOptions parallel;
  parallel.threads = 0;
  const LpResult a = solve_lp(lp, serial);
  const LpResult b = solve_lp(lp, parallel);
  REQUIRE(a.status == LpStatus::Optimal);
  REQUIRE(b.status == LpStatus::Optimal);
  CHECK(a.value == b.value);
  CHECK(a.x == b.x);
  CHECK(a.pivots == b.pivots);
}

TEST_CASE("the returned point satisfies every row exactly") {
  LinearProgram lp;
  const int x = lp.add_var(Rat(1, 7));
  const int y = lp.add_var(Rat(-2, 3));
  const int z = lp.add_var(Rat(1));
  lp.add_row({{x, Rat(1)}, {y, Rat(2)}, {z, Rat(1)}}, '<', Rat(10));
  lp.add_row({{x, Rat(1)}, {y, Rat(-1)}}, '>', Rat(-4));
  lp.add_row({{y, Rat(1)}, {z, Rat(3)}}, '=', Rat(6));
  const LpResult r = solve_lp(lp);
  REQUIRE(r.status == LpStatus::Optimal);
  const Rat row1 = r.x[0] + 2 * r.x[1] + r.x[2];
  const Rat row2 = r.x[0] - r.x[1];
  const Rat row3 = r.x[1] + 3 * r.x[2];
  CHECK(row1 <= 10);
  CHECK(row2 >= -4);
  CHECK(row3 == 6);
  for (const Rat& xi : r.x) CHECK(xi >= 0);
  // objective matches the point
  const Rat obj = Rat(1, 7) * r.x[0] + Rat(-2, 3) * r.x[1] + r.x[2];
  CHECK(r.value == obj);
}
