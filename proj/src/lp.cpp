#include "capkm/lp.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>

namespace capkm {

Rat FractionalSolution::connection_cost(const Instance& inst) const {
  Rat c(0);
  for (int i = 0; i < inst.m; ++i)
    for (int j = 0; j < inst.n; ++j)
      if (x[i][j] != 0) c += x[i][j] * inst.dist_fc(i, j);
  return c;
}

Rat FractionalSolution::opening_cost(const Instance& inst) const {
  Rat c(0);
  for (int i = 0; i < inst.m; ++i)
    if (y[i] != 0) c += y[i] * inst.fcost[i];
  return c;
}

Rat FractionalSolution::served(int i) const {
  Rat s(0);
  for (const Rat& v : x[i]) s += v;
  return s;
}

namespace {

// variable layout: y_i at i, x_ij at m + i*n + j
int xvar(const Instance& inst, int i, int j) { return inst.m + i * inst.n + j; }

LinearProgram build_ckfl_lp(const Instance& inst) {
  LinearProgram lp;
  for (int i = 0; i < inst.m; ++i) lp.add_var(inst.fcost[i]);
  for (int i = 0; i < inst.m; ++i)
    for (int j = 0; j < inst.n; ++j) lp.add_var(inst.dist_fc(i, j));
  for (int j = 0; j < inst.n; ++j) {
    std::vector<std::pair<int, Rat>> row;
    for (int i = 0; i < inst.m; ++i) row.emplace_back(xvar(inst, i, j), Rat(1));
    lp.add_row(std::move(row), '=', Rat(1));
  }
  for (int i = 0; i < inst.m; ++i)
    for (int j = 0; j < inst.n; ++j)
      lp.add_row({{xvar(inst, i, j), Rat(1)}, {i, Rat(-1)}}, '<', Rat(0));
  for (int i = 0; i < inst.m; ++i) {
    std::vector<std::pair<int, Rat>> row;
    for (int j = 0; j < inst.n; ++j) row.emplace_back(xvar(inst, i, j), Rat(1));
    row.emplace_back(i, -rat_ll(inst.cap[i]));
    lp.add_row(std::move(row), '<', Rat(0));
  }
  {
    std::vector<std::pair<int, Rat>> row;
    for (int i = 0; i < inst.m; ++i) row.emplace_back(i, Rat(1));
    lp.add_row(std::move(row), '<', rat_ll(inst.k));
  }
  for (int i = 0; i < inst.m; ++i) lp.add_row({{i, Rat(1)}}, '<', Rat(1));
  return lp;
}

}  // namespace

CkflLpResult solve_ckfl_lp(const Instance& inst, const SimplexOptions& opt) {
  CkflLpResult res;
  if (!capacity_feasible(inst)) {
    long long total = 0;
    std::vector<long long> caps = inst.cap;
    std::sort(caps.begin(), caps.end(), std::greater<>());
    for (long long i = 0; i < std::min<long long>(inst.k, caps.size()); ++i) total += caps[i];
    res.certificate = "sum of the k largest capacities is " + std::to_string(total) +
                      " < " + std::to_string(inst.n) + " clients";
    return res;
  }
  LinearProgram lp = build_ckfl_lp(inst);
  LpResult r = solve_lp(lp, opt);
  if (r.status != LpStatus::Optimal)
    throw std::logic_error("ckfl relaxation must be solvable once capacity-feasible");
  res.feasible = true;
  FractionalSolution& s = res.sol;
  s.value = r.value;
  s.pivots = r.pivots;
  s.y.assign(inst.m, Rat(0));
  s.x.assign(inst.m, std::vector<Rat>(inst.n, Rat(0)));
  for (int i = 0; i < inst.m; ++i) s.y[i] = r.x[i];
  for (int i = 0; i < inst.m; ++i)
    for (int j = 0; j < inst.n; ++j) s.x[i][j] = r.x[xvar(inst, i, j)];
  // exact feasibility audit of the returned extreme point
  for (int i = 0; i < inst.m; ++i) {
    if (s.y[i] < 0 || s.y[i] > 1) throw std::logic_error("lp audit: y out of [0,1]");
    Rat load(0);
    for (int j = 0; j < inst.n; ++j) {
      if (s.x[i][j] < 0 || s.x[i][j] > s.y[i]) throw std::logic_error("lp audit: x out of [0,y]");
      load += s.x[i][j];
    }
    if (load > rat_ll(inst.cap[i]) * s.y[i]) throw std::logic_error("lp audit: capacity row violated");
  }
  Rat ky(0);
  for (int i = 0; i < inst.m; ++i) ky += s.y[i];
  if (ky > rat_ll(inst.k)) throw std::logic_error("lp audit: k row violated");
  for (int j = 0; j < inst.n; ++j) {
    Rat served(0);
    for (int i = 0; i < inst.m; ++i) served += s.x[i][j];
    if (served != 1) throw std::logic_error("lp audit: assignment row violated");
  }
  return res;
}

void dump_ckfl_lp(const Instance& inst, std::ostream& out) {
  auto num = [](const Rat& q) { return rat_to_decimal(q, 17); };
  out << "\\ capacitated k-facility-location relaxation\nMinimize\n obj:";
  for (int i = 0; i < inst.m; ++i)
    if (inst.fcost[i] != 0) out << " + " << num(inst.fcost[i]) << " y" << i;
  for (int i = 0; i < inst.m; ++i)
    for (int j = 0; j < inst.n; ++j) out << " + " << num(inst.dist_fc(i, j)) << " x" << i << "_" << j;
  out << "\nSubject To\n";
  for (int j = 0; j < inst.n; ++j) {
    out << " assign" << j << ":";
    for (int i = 0; i < inst.m; ++i) out << " + x" << i << "_" << j;
    out << " = 1\n";
  }
  for (int i = 0; i < inst.m; ++i)
    for (int j = 0; j < inst.n; ++j)
      out << " link" << i << "_" << j << ": x" << i << "_" << j << " - y" << i << " <= 0\n";
  for (int i = 0; i < inst.m; ++i) {
    out << " cap" << i << ":";
    for (int j = 0; j < inst.n; ++j) out << " + x" << i << "_" << j;
    out << " - " << inst.cap[i] << " y" << i << " <= 0\n";
  }
  out << " cardinality:";
  for (int i = 0; i < inst.m; ++i) out << " + y" << i;
  out << " <= " << inst.k << "\nBounds\n";
  for (int i = 0; i < inst.m; ++i) out << " 0 <= y" << i << " <= 1\n";
  out << "End\n";
}

std::vector<Rat> star_initial_solution(const Instance& inst, const FractionalSolution& frac,
                                       const StarInstance& star) {
  std::vector<Rat> z;
  z.reserve(star.fac.size());
  for (int i : star.fac) {
    Rat v = frac.served(i) / rat_ll(inst.cap[i]);
    v.canonicalize();
    if (v > frac.y[i]) throw std::logic_error("star init: served/u exceeds y*");
    z.push_back(v);
  }
  return z;
}

std::vector<Rat> star_demand_distribution(const Instance& inst, const StarInstance& star,
                                          const std::vector<Rat>& z) {
  std::vector<int> order(star.fac.size());
  for (size_t a = 0; a < order.size(); ++a) order[a] = static_cast<int>(a);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const Rat& da = inst.dist_fc(star.fac[a], star.center);
    const Rat& db = inst.dist_fc(star.fac[b], star.center);
    if (da != db) return da < db;
    return star.fac[a] < star.fac[b];
  });
  std::vector<Rat> d(star.fac.size(), Rat(0));
  Rat left = star.w;
  for (int a : order) {
    if (left == 0) break;
    Rat room = z[a] * rat_ll(inst.cap[star.fac[a]]);
    d[a] = std::min(room, left);
    left -= d[a];
  }
  if (left != 0) throw std::logic_error("star demand distribution: capacity short of w");
  return d;
}

StarExtreme star_extreme_point(const Instance& inst, const StarInstance& star,
                               const SimplexOptions& opt) {
  LinearProgram lp;
  const int F = static_cast<int>(star.fac.size());
  for (int a = 0; a < F; ++a) lp.add_var(Rat(1));  // minimize volume
  std::vector<std::pair<int, Rat>> capacity, budget;
  for (int a = 0; a < F; ++a) {
    int i = star.fac[a];
    capacity.emplace_back(a, rat_ll(inst.cap[i]));
    budget.emplace_back(a, inst.fcost[i] + inst.dist_fc(i, star.center) * rat_ll(inst.cap[i]));
  }
  lp.add_row(std::move(capacity), '>', star.w);
  lp.add_row(std::move(budget), '<', star.b());
  for (int a = 0; a < F; ++a) lp.add_row({{a, Rat(1)}}, '<', Rat(1));
  LpResult r = solve_lp(lp, opt);
  if (r.status != LpStatus::Optimal)
    throw std::logic_error("star polytope is nonempty by construction, solver disagreed");
  StarExtreme ex;
  ex.z = r.x;
  int fractional = 0;
  for (const Rat& v : ex.z)
    if (v != 0 && v != 1) ++fractional;
  if (fractional > 2)
    throw std::logic_error("extreme star point with more than two fractional entries");
  ex.demand = star_demand_distribution(inst, star, ex.z);
  return ex;
}

std::vector<Rat> star_almost_integral(const Instance& inst, const StarInstance& star,
                                      const std::vector<Rat>& z) {
  if (!inst.uniform_caps())
    throw std::invalid_argument("star_almost_integral requires uniform capacities");
  Rat vol(0);
  for (const Rat& v : z) vol += v;
  std::vector<int> order(star.fac.size());
  for (size_t a = 0; a < order.size(); ++a) order[a] = static_cast<int>(a);
  const long long u = inst.cap[0];
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    Rat ca = inst.dist_fc(star.fac[a], star.center) * rat_ll(u) + inst.fcost[star.fac[a]];
    Rat cb = inst.dist_fc(star.fac[b], star.center) * rat_ll(u) + inst.fcost[star.fac[b]];
    if (ca != cb) return ca < cb;
    return star.fac[a] < star.fac[b];
  });
  std::vector<Rat> out(star.fac.size(), Rat(0));
  Rat left = vol;
  for (int a : order) {
    if (left <= 0) break;
    out[a] = std::min(Rat(1), left);
    left -= out[a];
  }
  return out;
}

}  // namespace capkm
