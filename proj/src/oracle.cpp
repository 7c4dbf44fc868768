#include "capkm/oracle.hpp"

#include <omp.h>

#include <algorithm>
#include <stdexcept>

#include "capkm/flow.hpp"

namespace capkm {

AssignmentResult min_cost_assignment(const Instance& inst, const std::vector<int>& open,
                                     const Rat& gamma) {
  AssignmentResult res;
  if (gamma <= 0) throw ValidationError("min_cost_assignment: gamma must be positive");
  // Common denominator of the gamma*u_i caps; supplies scale by the same L.
  Int L(1);
  std::vector<Rat> caps;
  caps.reserve(open.size());
  for (int i : open) {
    Rat c = gamma * rat_ll(inst.cap[i]);
    c.canonicalize();
    caps.push_back(c);
    Int d = c.get_den();
    mpz_lcm(L.get_mpz_t(), L.get_mpz_t(), d.get_mpz_t());
  }
  const int F = static_cast<int>(open.size());
  const int V = 2 + inst.n + F;
  const int s = 0, t = 1;
  MinCostFlow mcf(V);
  std::vector<int> client_arc(static_cast<size_t>(inst.n) * F, -1);
  for (int j = 0; j < inst.n; ++j) mcf.add_arc(s, 2 + j, L, Rat(0));
  for (int a = 0; a < F; ++a) {
    Rat scaled = caps[a] * Rat(L);
    scaled.canonicalize();
    mcf.add_arc(2 + inst.n + a, t, scaled.get_num(), Rat(0));
  }
  for (int j = 0; j < inst.n; ++j)
    for (int a = 0; a < F; ++a)
      client_arc[static_cast<size_t>(j) * F + a] =
          mcf.add_arc(2 + j, 2 + inst.n + a, L, inst.dist_fc(open[a], j));
  Int want = Int(inst.n) * L;
  auto [value, cost] = mcf.solve(s, t, want);
  if (value != want) return res;  // infeasible: caps cannot carry all demand
  res.feasible = true;
  res.cost = cost / Rat(L);
  res.cost.canonicalize();
  res.x.assign(inst.m, std::vector<Rat>(inst.n, Rat(0)));
  for (int j = 0; j < inst.n; ++j)
    for (int a = 0; a < F; ++a) {
      Int f = mcf.flow_on(client_arc[static_cast<size_t>(j) * F + a]);
      if (f != 0) {
        Rat v(f, L);
        v.canonicalize();
        res.x[open[a]][j] = v;
      }
    }
  return res;
}

namespace {

struct Candidate {
  bool found = false;
  Rat cost;
  unsigned mask = 0;
};

// (cost, popcount, mask) lexicographic; deterministic regardless of the
// order candidates are merged in.
bool better(const Candidate& a, const Candidate& b) {
  if (!a.found || !b.found) return a.found;
  if (a.cost != b.cost) return a.cost < b.cost;
  int pa = __builtin_popcount(a.mask), pb = __builtin_popcount(b.mask);
  if (pa != pb) return pa < pb;
  return a.mask < b.mask;
}

}  // namespace

ExactOptResult exact_opt(const Instance& inst, const Rat& gamma, const OracleOptions& opt) {
  if (inst.m > opt.max_facilities)
    throw ValidationError("exact_opt: instance exceeds the enumeration guard of " +
                                std::to_string(opt.max_facilities) + " facilities");
  const unsigned total = 1u << inst.m;
  const int threads = opt.parallel ? omp_get_max_threads() : 1;
  std::vector<Candidate> bests(threads);

#pragma omp parallel for schedule(dynamic, 64) num_threads(threads)
  for (unsigned mask = 1; mask < total; ++mask) {
    if (__builtin_popcount(mask) > inst.k) continue;
    std::vector<int> open;
    Rat open_cost(0);
    long long cap_sum = 0;
    for (int i = 0; i < inst.m; ++i)
      if (mask & (1u << i)) {
        open.push_back(i);
        open_cost += inst.fcost[i];
        cap_sum += inst.cap[i];
      }
    // quick reject: even violated capacities cannot carry the demand
    if (rat_ll(cap_sum) * gamma < inst.n) continue;
    AssignmentResult as = min_cost_assignment(inst, open, gamma);
    if (!as.feasible) continue;
    Candidate c{true, as.cost + open_cost, mask};
    Candidate& best = bests[omp_get_thread_num()];
    if (better(c, best)) best = c;
  }

  Candidate best;
  for (const Candidate& c : bests)
    if (better(c, best)) best = c;

  ExactOptResult res;
  if (!best.found) return res;
  res.feasible = true;
  res.cost = best.cost;
  for (int i = 0; i < inst.m; ++i)
    if (best.mask & (1u << i)) res.open.push_back(i);
  return res;
}

VerifyResult verify_solution(const Instance& inst, const IntegralSolution& sol, const Rat& gamma,
                             const Rat& cost_bound) {
  VerifyResult vr;
  vr.stats = eval_solution(inst, sol);
  if (static_cast<long long>(sol.open.size()) > inst.k) {
    vr.reason = "opens " + std::to_string(sol.open.size()) + " facilities, k = " +
                std::to_string(inst.k);
    return vr;
  }
  if (!vr.stats.assignment_ok) {
    vr.reason = "assignment is not a unit-demand transportation on the open set";
    return vr;
  }
  if (vr.stats.max_violation > gamma) {
    vr.reason = "capacity violation " + rat_to_string(vr.stats.max_violation) + " exceeds " +
                rat_to_string(gamma);
    return vr;
  }
  if (vr.stats.total_cost > cost_bound) {
    vr.reason = "cost " + rat_to_string(vr.stats.total_cost) + " exceeds bound " +
                rat_to_string(cost_bound);
    return vr;
  }
  vr.ok = true;
  return vr;
}

}  // namespace capkm
