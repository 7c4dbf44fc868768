#pragma once

#include <utility>
#include <vector>

#include "capkm/rational.hpp"

namespace capkm {

// Dense two-phase primal simplex over exact rationals.
//
// Pricing is Dantzig (most negative reduced cost) and switches to Bland's
// rule after a window of consecutive degenerate pivots, so termination is
// guaranteed without perturbation. All comparisons are exact; the returned
// point is a basic feasible solution, i.e. an extreme point of the feasible
// region. Row elimination is the OpenMP kernel; with threads=1 the serial
// reference path runs. Exact arithmetic makes both paths bitwise identical.
struct LinearProgram {
  int num_vars = 0;
  std::vector<Rat> c;  // minimize c^T x, x >= 0

  struct Row {
    std::vector<std::pair<int, Rat>> coef;
    char rel;  // '<', '=', '>'
    Rat rhs;
  };
  std::vector<Row> rows;

  int add_var(Rat obj) {
    c.push_back(std::move(obj));
    return num_vars++;
  }
  void add_row(std::vector<std::pair<int, Rat>> coef, char rel, Rat rhs) {
    rows.push_back(Row{std::move(coef), rel, std::move(rhs)});
  }
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  Rat value;           // objective at the optimum
  std::vector<Rat> x;  // structural variables
  long pivots = 0;
};

struct SimplexOptions {
  int threads = 0;        // 0: all available; 1: serial reference path
  int stall_window = 64;  // degenerate pivots tolerated before Bland's rule
};

LpResult solve_lp(const LinearProgram& lp, const SimplexOptions& opt = {});

}  // namespace capkm
