#include "capkm/bundling.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace capkm {

namespace {

void audit_fail(const std::string& what) { throw std::logic_error("bundling audit: " + what); }

}  // namespace

Bundling build_bundles(const Instance& inst, const FractionalSolution& frac, int ell) {
  if (ell < 2) throw ValidationError("bundling requires ell >= 2");
  Bundling b;
  b.ell = ell;
  b.d_av.assign(inst.n, Rat(0));
  for (int j = 0; j < inst.n; ++j) {
    Rat s = 0;
    for (int i = 0; i < inst.m; ++i) s += frac.x[i][j] * inst.dist_fc(i, j);
    b.d_av[j] = canon(s);
  }

  // Greedy selection by ascending d_av, client id as tie-break.
  std::vector<char> alive(inst.n, 1);
  for (;;) {
    int best = -1;
    for (int j = 0; j < inst.n; ++j) {
      if (!alive[j]) continue;
      if (best < 0 || b.d_av[j] < b.d_av[best]) best = j;
    }
    if (best < 0) break;
    b.centers.push_back(best);
    for (int j = 0; j < inst.n; ++j) {
      if (alive[j] && inst.dist_cc(best, j) <= Rat(2 * ell) * b.d_av[j]) alive[j] = 0;
    }
  }

  const int nc = static_cast<int>(b.centers.size());
  for (int a = 0; a < nc; ++a) {
    for (int c = a + 1; c < nc; ++c) {
      const Rat d = inst.dist_cc(b.centers[a], b.centers[c]);
      const Rat lim = Rat(2 * ell) * std::max(b.d_av[b.centers[a]], b.d_av[b.centers[c]]);
      if (d <= lim) audit_fail("centers too close");
    }
  }
  for (int j = 0; j < inst.n; ++j) {
    bool covered = false;
    for (int c = 0; c < nc && !covered; ++c)
      covered = inst.dist_cc(b.centers[c], j) <= Rat(2 * ell) * b.d_av[j];
    if (!covered) audit_fail("client " + std::to_string(j) + " not covered by any center");
  }

  // Facilities join the bundle of the nearest center, earlier center on ties.
  b.owner.assign(inst.m, -1);
  for (int i = 0; i < inst.m; ++i) {
    int best = 0;
    for (int c = 1; c < nc; ++c) {
      if (inst.dist_fc(i, b.centers[c]) < inst.dist_fc(i, b.centers[best])) best = c;
    }
    b.owner[i] = best;
  }

  b.stars.assign(nc, StarInstance{});
  for (int c = 0; c < nc; ++c) b.stars[c].center = b.centers[c];
  for (int i = 0; i < inst.m; ++i) b.stars[b.owner[i]].fac.push_back(i);

  Rat budget_sum = 0;
  const Rat min_vol = Rat(ell - 1, ell);
  for (int c = 0; c < nc; ++c) {
    StarInstance& st = b.stars[c];
    Rat w = 0, bf = 0, bc = 0, vol = 0;
    for (int i : st.fac) {
      vol += frac.y[i];
      bf += frac.y[i] * inst.fcost[i];
      for (int j = 0; j < inst.n; ++j) {
        const Rat& xij = frac.x[i][j];
        if (xij == 0) continue;
        w += xij;
        bc += xij * (inst.dist_fc(i, j) + Rat(2 * ell) * b.d_av[j]);
      }
    }
    st.w = canon(w);
    st.b_f = canon(bf);
    st.b_c = canon(bc);
    st.vol_f = canon(vol);
    if (st.vol_f < min_vol)
      audit_fail("bundle volume " + rat_to_string(st.vol_f) + " below 1-1/ell");
    budget_sum += st.b();
  }

  const Rat conn = frac.connection_cost(inst);
  const Rat open = frac.opening_cost(inst);
  if (canon(budget_sum) != canon(open + Rat(1 + 2 * ell) * conn))
    audit_fail("budget sum mismatch");
  if (budget_sum > Rat(1 + 2 * ell) * frac.value) audit_fail("budget sum exceeds (1+2l)*LP");
  return b;
}

TransportPlan transport_to_centers(const Instance& inst, const FractionalSolution& frac,
                                   const Bundling& b) {
  const int nc = static_cast<int>(b.centers.size());
  TransportPlan plan;
  plan.collected.assign(nc, Rat(0));
  plan.moved.assign(nc, std::vector<Rat>(inst.n, Rat(0)));
  Rat cost = 0;
  for (int i = 0; i < inst.m; ++i) {
    const int c = b.owner[i];
    const int center = b.centers[c];
    for (int j = 0; j < inst.n; ++j) {
      const Rat& xij = frac.x[i][j];
      if (xij == 0) continue;
      const Rat hop = inst.dist_cc(center, j);
      if (hop > Rat(2) * inst.dist_fc(i, j) + Rat(2 * b.ell) * b.d_av[j])
        audit_fail("transport hop exceeds 2d(i,j)+2l*d_av(j)");
      plan.moved[c][j] += xij;
      plan.collected[c] += xij;
      cost += xij * hop;
    }
  }
  for (int c = 0; c < nc; ++c) {
    plan.collected[c] = canon(plan.collected[c]);
    if (plan.collected[c] != b.stars[c].w) audit_fail("collected demand != star demand");
    for (Rat& v : plan.moved[c]) v = canon(v);
  }
  plan.total_cost = canon(cost);
  const Rat conn = frac.connection_cost(inst);
  if (plan.total_cost > Rat(2 + 2 * b.ell) * conn)
    audit_fail("transport cost exceeds (2+2l)*connection");
  return plan;
}

}  // namespace capkm
