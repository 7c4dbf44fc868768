#include "capkm/ckm_nonuniform.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <utility>

#include "capkm/oracle.hpp"

namespace capkm {

namespace {

void audit_fail(const std::string& what) { throw std::logic_error("rounding audit: " + what); }

bool is_frac(const Rat& q) { return q > 0 && q < 1; }

// Two fractionally open facilities a and b of one star merge into a single
// one. When both choices keep the violation (d_a+d_b)/((z_a+z_b)u) within
// 1+eps_p, take the one closer to the center; otherwise exactly one choice is
// violation-free (the larger capacity) and we must take it.
int merge_survivor(const Instance& inst, const StarInstance& star, const std::vector<Rat>& z,
                   const std::vector<Rat>& dem, int a, int b, const Rat& eps_p) {
  const Rat load = dem[a] + dem[b];
  const Rat vol = z[a] + z[b];
  if (vol <= 0) audit_fail("merge of two closed facilities");
  auto violates = [&](int t) {
    return load > (Rat(1) + eps_p) * vol * rat_ll(inst.cap[star.fac[t]]);
  };
  const bool bad_a = violates(a);
  const bool bad_b = violates(b);
  if (!bad_a && !bad_b) {
    const Rat da = inst.dist_fc(star.fac[a], star.center);
    const Rat db = inst.dist_fc(star.fac[b], star.center);
    if (da != db) return da < db ? a : b;
    return star.fac[a] < star.fac[b] ? a : b;
  }
  if (bad_a && bad_b) audit_fail("both merge choices exceed the tolerated violation");
  return bad_a ? b : a;
}

// Opens the higher-demand one integrally and moves the other's demand onto
// it. Requires z_a + z_b >= 1 so the level jump to 1 is paid for.
int open_integrally(const StarInstance& star, std::vector<Rat>& z, std::vector<Rat>& dem, int a,
                    int b) {
  if (z[a] + z[b] < 1) audit_fail("integral merge needs combined opening >= 1");
  int win = b;
  if (dem[a] != dem[b])
    win = dem[a] > dem[b] ? a : b;
  else if (star.fac[a] != star.fac[b])
    win = star.fac[a] < star.fac[b] ? a : b;
  const int lose = win == a ? b : a;
  dem[win] += dem[lose];
  dem[lose] = 0;
  z[win] = 1;
  z[lose] = 0;
  return win;
}

}  // namespace

ConsolidatedStar consolidate_star(const Instance& inst, const StarInstance& star,
                                  const StarExtreme& extreme, const Rat& eps) {
  if (eps <= 0) throw ValidationError("consolidation requires eps > 0");
  const int nf = static_cast<int>(star.fac.size());
  if (static_cast<int>(extreme.z.size()) != nf || static_cast<int>(extreme.demand.size()) != nf)
    audit_fail("extreme point size mismatch");

  Rat vol = 0, wsum = 0;
  int nfrac = 0;
  for (int t = 0; t < nf; ++t) {
    const Rat& zt = extreme.z[t];
    if (zt < 0 || zt > 1) audit_fail("extreme opening outside [0,1]");
    if (extreme.demand[t] < 0) audit_fail("negative extreme demand");
    if (extreme.demand[t] > zt * rat_ll(inst.cap[star.fac[t]]))
      audit_fail("extreme demand exceeds z*u");
    if (is_frac(zt)) ++nfrac;
    vol += zt;
    wsum += extreme.demand[t];
  }
  if (canon(wsum) != canon(star.w)) audit_fail("extreme demand does not sum to w");
  if (nfrac > 2) audit_fail("extreme point with more than two fractional openings");
  if (vol > star.vol_f) audit_fail("extreme volume above the bundle volume");

  ConsolidatedStar out;
  out.z = extreme.z;
  out.demand = extreme.demand;

  const Rat level = std::min(Rat(1), star.vol_f);
  if (vol < 1) {
    std::vector<int> sup;
    for (int t = 0; t < nf; ++t)
      if (out.z[t] > 0) sup.push_back(t);
    if (sup.empty()) {
      if (star.w != 0) audit_fail("demand without any open facility");
    } else {
      int keep = sup[0];
      if (sup.size() == 2) {
        keep = merge_survivor(inst, star, out.z, out.demand, sup[0], sup[1], eps);
        const int lose = keep == sup[0] ? sup[1] : sup[0];
        out.demand[keep] += out.demand[lose];
        out.demand[lose] = 0;
        out.z[lose] = 0;
      } else if (sup.size() > 2) {
        audit_fail("small star with more than two open facilities");
      }
      out.z[keep] = level;
    }
  } else {
    std::vector<int> sup;
    for (int t = 0; t < nf; ++t)
      if (is_frac(out.z[t])) sup.push_back(t);
    if (!sup.empty()) {
      // Two open facilities with the smallest opening; with at most two
      // fractional entries these are the fractional ones plus, if needed, the
      // lowest-id integral one.
      std::vector<int> open;
      for (int t = 0; t < nf; ++t)
        if (out.z[t] > 0) open.push_back(t);
      std::sort(open.begin(), open.end(), [&](int a, int b) {
        if (out.z[a] != out.z[b]) return out.z[a] < out.z[b];
        return star.fac[a] < star.fac[b];
      });
      if (open.size() < 2) audit_fail("big star with a single fractional facility");
      const int i1 = open[0], i2 = open[1];
      if (out.z[i1] + out.z[i2] >= 1) {
        open_integrally(star, out.z, out.demand, i1, i2);
      } else {
        int integral = -1;
        for (int t : open)
          if (out.z[t] == 1 && (integral < 0 || star.fac[t] < star.fac[integral])) integral = t;
        if (integral < 0) audit_fail("big star lacks an integrally open facility");
        const int c = merge_survivor(inst, star, out.z, out.demand, i1, i2, eps / 2);
        const int lose = c == i1 ? i2 : i1;
        out.z[c] += out.z[lose];
        out.demand[c] += out.demand[lose];
        out.z[lose] = 0;
        out.demand[lose] = 0;
        open_integrally(star, out.z, out.demand, integral, c);
      }
    }
  }

  // Shape, volume, violation, conservation and move-cost audits.
  Rat volp = 0, wp = 0;
  int open_cnt = 0, frac_cnt = 0;
  for (int t = 0; t < nf; ++t) {
    const Rat& zt = out.z[t];
    if (zt < 0 || zt > 1) audit_fail("consolidated opening outside [0,1]");
    if (zt == 0 && out.demand[t] != 0) audit_fail("demand on a closed facility");
    volp += zt;
    wp += out.demand[t];
    if (zt > 0) ++open_cnt;
    if (is_frac(zt)) ++frac_cnt;
    const Rat u = rat_ll(inst.cap[star.fac[t]]);
    if (is_frac(zt)) {
      if (out.demand[t] > (Rat(1) + eps) * zt * u)
        audit_fail("fractional facility violates (1+eps)*z*u");
    } else if (zt == 1) {
      if (out.demand[t] > (Rat(2) + eps) * u) audit_fail("integral facility violates (2+eps)*u");
    }
  }
  if (canon(wp) != canon(star.w)) audit_fail("consolidation lost demand");
  if (volp > star.vol_f) audit_fail("consolidation raised the volume above the bundle's");
  if (frac_cnt > 0 && !(open_cnt == 1 && frac_cnt == 1 && canon(volp) == canon(level)))
    audit_fail("fractional consolidation must be a single facility at min(1, vol)");

  out.move_cost = 0;
  for (int t = 0; t < nf; ++t) out.move_cost += out.demand[t] * inst.dist_fc(star.fac[t], star.center);
  if (out.move_cost > (Rat(2) + Rat(4) / eps) * star.b())
    audit_fail("redistribution cost above (2+4/eps) * b_j");
  return out;
}

LeveledSolution build_interval_solution(const Instance& inst, const FractionalSolution& frac,
                                        const Bundling& b, const TransportPlan& plan,
                                        const std::vector<ConsolidatedStar>& cons,
                                        const Rat& eps) {
  (void)eps;
  const int nc = static_cast<int>(b.stars.size());
  if (static_cast<int>(cons.size()) != nc) audit_fail("one consolidated star per bundle expected");

  LeveledSolution lev;
  lev.y.assign(inst.m, Rat(0));
  lev.demand.assign(inst.m, Rat(0));
  lev.x.assign(inst.m, std::vector<Rat>(inst.n, Rat(0)));
  lev.star_of.assign(inst.m, -1);

  const Rat lo = Rat(b.ell - 1, b.ell);
  for (int c = 0; c < nc; ++c) {
    const StarInstance& star = b.stars[c];
    const ConsolidatedStar& cz = cons[c];
    for (int t = 0; t < static_cast<int>(star.fac.size()); ++t) {
      const int i = star.fac[t];
      if (lev.star_of[i] != -1) audit_fail("facility in two bundles");
      lev.star_of[i] = c;
      lev.y[i] = cz.z[t];
      lev.demand[i] = cz.demand[t];
      if (lev.y[i] > 0 && (lev.y[i] < lo || lev.y[i] > 1))
        audit_fail("positive opening outside [1-1/ell, 1]");
      if (star.w > 0 && cz.demand[t] > 0) {
        const Rat share = cz.demand[t] / star.w;
        for (int j = 0; j < inst.n; ++j) {
          if (plan.moved[c][j] == 0) continue;
          lev.x[i][j] += share * plan.moved[c][j];
        }
      }
    }
    if (star.w == 0) {
      for (int j = 0; j < inst.n; ++j)
        if (plan.moved[c][j] != 0) audit_fail("transport into a zero-demand star");
    }
  }
  for (int i = 0; i < inst.m; ++i)
    if (lev.star_of[i] < 0) audit_fail("facility outside every bundle");

  Rat total_demand = 0;
  for (int j = 0; j < inst.n; ++j) {
    Rat served = 0;
    for (int i = 0; i < inst.m; ++i) {
      if (lev.x[i][j] < 0) audit_fail("negative assignment entry");
      if (lev.x[i][j] > lev.y[i]) audit_fail("assignment above the opening level");
      served += lev.x[i][j];
    }
    if (canon(served) != 1) audit_fail("client " + std::to_string(j) + " not fully served");
  }
  lev.direct_cost = 0;
  for (int i = 0; i < inst.m; ++i) {
    Rat load = 0;
    for (int j = 0; j < inst.n; ++j) {
      if (lev.x[i][j] == 0) continue;
      lev.direct_cost += lev.x[i][j] * inst.dist_fc(i, j);
      load += lev.x[i][j];
    }
    if (canon(load) != canon(lev.demand[i])) audit_fail("assignment load differs from d'");
    total_demand += lev.demand[i];
  }
  if (canon(total_demand) != Rat(inst.n)) audit_fail("total demand must equal n");

  Rat moved_cost = 0;
  for (const ConsolidatedStar& cz : cons) moved_cost += cz.move_cost;
  if (lev.direct_cost > moved_cost + plan.total_cost)
    audit_fail("direct cost above redistribution plus transport");
  (void)frac;
  return lev;
}

SnappedSolution snap_levels(const Instance& inst, const LeveledSolution& lev, int ell, int k) {
  if (ell < 2) throw ValidationError("snapping requires ell >= 2");
  const Rat lo = Rat(ell - 1, ell);
  SnappedSolution snap;
  snap.y = lev.y;
  snap.s.assign(inst.m, -1);

  std::vector<int> ones, fracs, positives;
  Rat vol = 0;
  for (int i = 0; i < inst.m; ++i) {
    const Rat& yi = lev.y[i];
    vol += yi;
    if (yi == 0) continue;
    if (yi < lo || yi > 1) audit_fail("level outside [1-1/ell, 1]");
    positives.push_back(i);
    if (yi == 1)
      ones.push_back(i);
    else
      fracs.push_back(i);
  }
  if (vol > Rat(k)) audit_fail("opening volume above k");

  for (int i : fracs) {
    int best = -1;
    for (int p : positives) {
      if (p == i) continue;
      if (best < 0 || inst.dist_ff(p, i) < inst.dist_ff(best, i) ||
          (inst.dist_ff(p, i) == inst.dist_ff(best, i) && p < best))
        best = p;
    }
    snap.s[i] = best;
  }

  long long praw = static_cast<long long>(k) * ell - static_cast<long long>(ones.size()) * ell -
                   static_cast<long long>(fracs.size()) * (ell - 1);
  if (praw < 0) audit_fail("negative promotion count despite volume <= k");
  const long long pcount = std::min<long long>(praw, static_cast<long long>(fracs.size()));

  // Heaviest d'_i * d(s(i), i) first; those jump to level 1 for free in the
  // exchange bound below.
  std::vector<int> order = fracs;
  std::vector<Rat> weight(inst.m, Rat(0));
  for (int i : fracs)
    if (snap.s[i] >= 0) weight[i] = lev.demand[i] * inst.dist_ff(snap.s[i], i);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (weight[a] != weight[b]) return weight[a] > weight[b];
    return a < b;
  });
  for (long long t = 0; t < pcount; ++t) snap.y[order[t]] = 1;
  for (size_t t = pcount; t < order.size(); ++t) snap.y[order[t]] = lo;
  snap.promoted = static_cast<int>(pcount);

  Rat before = 0, after = 0, volhat = 0;
  for (int i : fracs) {
    before += lev.demand[i] * (Rat(1) - lev.y[i]) * (snap.s[i] >= 0 ? inst.dist_ff(snap.s[i], i) : Rat(0));
    after += lev.demand[i] * (Rat(1) - snap.y[i]) * (snap.s[i] >= 0 ? inst.dist_ff(snap.s[i], i) : Rat(0));
  }
  if (after > before) audit_fail("snapping increased the weighted closing mass");
  for (int i = 0; i < inst.m; ++i) volhat += snap.y[i];
  if (volhat > Rat(k)) audit_fail("snapped volume above k");
  if (pcount == praw && canon(volhat) != Rat(k)) audit_fail("snapped volume must equal k");

  for (int i = 0; i < inst.m; ++i) {
    if (snap.y[i] == 1)
      snap.n1.push_back(i);
    else if (snap.y[i] > 0)
      snap.n2.push_back(i);
  }
  for (int i : snap.n2)
    if (snap.s[i] < 0) audit_fail("fractional facility without a neighbor");
  return snap;
}

FacilityForest build_facility_forest(const Instance& inst, const SnappedSolution& snap) {
  FacilityForest forest;
  forest.parent.assign(inst.m, -1);
  std::vector<char> in_n2(inst.m, 0);
  for (int i : snap.n2) in_n2[i] = 1;
  for (int i : snap.n2) {
    const int p = snap.s[i];
    if (p < 0 || p == i || snap.y[p] == 0) audit_fail("bad neighbor edge");
    forest.parent[i] = p;
  }
  for (int i : snap.n2) {
    const int p = forest.parent[i];
    if (p >= 0 && in_n2[p] && forest.parent[p] == i && i < p) {
      forest.parent[i] = -1;
      forest.cut_roots.push_back(i);
    }
  }
  // The mutual-nearest construction admits no longer cycles; walking up must
  // terminate within m steps for every node.
  for (int i : snap.n2) {
    int v = i, steps = 0;
    while (v >= 0 && forest.parent[v] >= 0) {
      v = forest.parent[v];
      if (++steps > inst.m) audit_fail("cycle of length > 2 in the neighbor graph");
    }
  }
  return forest;
}

StarCut decompose_forest(const Instance& inst, const SnappedSolution& snap,
                         const FacilityForest& forest) {
  std::vector<std::vector<int>> children(inst.m);
  std::vector<char> active(inst.m, 0), positive(inst.m, 0);
  for (int i : snap.n1) active[i] = positive[i] = 1;
  for (int i : snap.n2) active[i] = positive[i] = 1;
  for (int i : snap.n2)
    if (forest.parent[i] >= 0) children[forest.parent[i]].push_back(i);

  std::vector<int> depth(inst.m, 0);
  for (int i : snap.n2) {
    int v = i, d = 0;
    while (forest.parent[v] >= 0) {
      v = forest.parent[v];
      ++d;
    }
    depth[i] = d;
  }

  std::vector<int> active_children(inst.m, 0);
  for (int i = 0; i < inst.m; ++i) active_children[i] = static_cast<int>(children[i].size());

  StarCut cut;
  for (;;) {
    int leaf = -1;
    for (int i : snap.n2) {
      if (!active[i] || forest.parent[i] < 0 || active_children[i] != 0) continue;
      if (leaf < 0 || depth[i] > depth[leaf] || (depth[i] == depth[leaf] && i < leaf)) leaf = i;
    }
    if (leaf < 0) break;
    const int p = forest.parent[leaf];
    if (!active[p]) audit_fail("leaf kept an edge to a removed facility");
    FacilityStar star;
    star.root = p;
    for (int c : children[p]) {
      if (!active[c]) audit_fail("star child already removed");
      if (active_children[c] != 0) audit_fail("deepest leaf has a deeper cousin");
      star.leaves.push_back(c);
      active[c] = 0;
    }
    active[p] = 0;
    if (forest.parent[p] >= 0) --active_children[forest.parent[p]];
    std::sort(star.leaves.begin(), star.leaves.end());
    cut.stars.push_back(std::move(star));
  }

  // Whatever survives has no incident tree edge: level-1 facilities stand
  // alone, a leftover fractional root hangs onto the star that consumed its
  // former 2-cycle partner.
  for (int i = 0; i < inst.m; ++i) {
    if (!active[i]) continue;
    if (snap.y[i] == 1) {
      cut.plain.push_back(i);
      continue;
    }
    const int t = snap.s[i];
    bool attached = false;
    for (FacilityStar& st : cut.stars) {
      if (st.root != t) continue;
      st.leaves.push_back(i);
      std::sort(st.leaves.begin(), st.leaves.end());
      attached = true;
      break;
    }
    if (!attached) audit_fail("leftover fractional root has no star to join");
  }

  std::vector<int> seen(inst.m, 0);
  for (const FacilityStar& st : cut.stars) {
    ++seen[st.root];
    for (int c : st.leaves) ++seen[c];
  }
  for (int i : cut.plain) ++seen[i];
  for (int i = 0; i < inst.m; ++i) {
    if (positive[i] && seen[i] != 1) audit_fail("positive facility not covered exactly once");
    if (!positive[i] && seen[i] != 0) audit_fail("closed facility inside the decomposition");
  }
  return cut;
}

RoundOutcome round_facility_stars(const Instance& inst, const SnappedSolution& snap,
                                  const StarCut& cut, const LeveledSolution& lev, const Rat& eps,
                                  int ell) {
  RoundOutcome out;
  out.open.assign(inst.m, 0);
  out.target.assign(inst.m, -1);
  std::vector<Rat> carried(inst.m, Rat(0));

  for (int i : cut.plain) {
    out.open[i] = 1;
    out.target[i] = i;
  }

  for (const FacilityStar& st : cut.stars) {
    const int r = st.root;
    const bool root_frac = snap.y[r] < 1;
    std::vector<int> seq = st.leaves;
    if (root_frac) seq.push_back(r);
    std::sort(seq.begin(), seq.end(), [&](int a, int b) {
      if (lev.demand[a] != lev.demand[b]) return lev.demand[a] < lev.demand[b];
      return a < b;
    });
    auto d2r = [&](int v) { return v == r ? Rat(0) : inst.dist_ff(v, r); };
    auto route = [&](int from, int to) {
      out.target[from] = to;
      const Rat amt = lev.demand[from];
      out.charged += amt * (d2r(from) + d2r(to));
      if (from != r) carried[from] += amt;
      if (to != r) carried[to] += amt;
    };
    auto open_self = [&](int v) {
      out.open[v] = 1;
      out.target[v] = v;
    };

    int opens = 0;
    const int q = static_cast<int>(seq.size());
    if (q == 0) audit_fail("star without fractional members");
    if (q % 2 == 0) {
      for (int t = 0; t + 1 < q; t += 2) {
        open_self(seq[t + 1]);
        ++opens;
        route(seq[t], seq[t + 1]);
      }
      if (!root_frac) {
        open_self(r);
        ++opens;
      }
    } else if (root_frac) {
      if (q < 3) audit_fail("odd all-fractional star smaller than three");
      for (int t = 2; t < q; t += 2) {
        open_self(seq[t]);
        ++opens;
      }
      route(seq[0], seq[2]);
      for (int t = 1; t + 1 < q; t += 2) route(seq[t], seq[t + 1]);
    } else {
      for (int t = 2; t < q; t += 2) {
        open_self(seq[t]);
        ++opens;
      }
      for (int t = 1; t + 1 < q; t += 2) route(seq[t], seq[t + 1]);
      if (lev.demand[r] / 2 >= lev.demand[seq[0]]) {
        open_self(r);
        ++opens;
        route(seq[0], r);
      } else {
        open_self(seq[0]);
        ++opens;
        route(r, seq[0]);
      }
    }

    Rat level_sum = snap.y[r];
    for (int c : st.leaves) level_sum += snap.y[c];
    if (Int(opens) > floor_int(level_sum)) audit_fail("star opened more than floor of its level sum");
    if (opens < 1) audit_fail("star opened nothing");
  }

  for (int i : snap.n1)
    if (out.target[i] < 0) audit_fail("level-1 facility without a destination");
  for (int i : snap.n2) {
    if (out.target[i] < 0) audit_fail("fractional facility without a destination");
    if (carried[i] > Rat(2) * lev.demand[i]) audit_fail("edge carries more than twice its demand");
  }

  std::vector<Rat> load(inst.m, Rat(0));
  Rat s_hat = 0;
  for (int i = 0; i < inst.m; ++i) {
    if (out.target[i] >= 0) {
      if (!out.open[out.target[i]]) audit_fail("demand routed to a closed facility");
      if (out.open[i] && out.target[i] != i) audit_fail("open facility must serve itself");
      load[out.target[i]] += lev.demand[i];
    } else if (out.open[i]) {
      audit_fail("open facility without a destination");
    }
  }
  const Rat gamma = Rat(3) + Rat(3) * eps;
  for (int i = 0; i < inst.m; ++i)
    if (load[i] > gamma * rat_ll(inst.cap[i])) audit_fail("load above (3+3eps)*u after rerouting");
  for (int i : snap.n2) s_hat += lev.demand[i] * inst.dist_ff(snap.s[i], i);
  if (out.charged > Rat(2) * s_hat) audit_fail("rerouting cost above twice the closing mass");
  (void)ell;
  return out;
}

NonuniformResult solve_ckm_nonuniform(const Instance& inst, const Rat& eps, int ell,
                                      const SimplexOptions& opt) {
  if (eps <= 0) throw ValidationError("eps must be positive");
  if (ell < 2) throw ValidationError("ell must be at least 2");
  if (!inst.zero_open_costs())
    throw ValidationError("the general-capacity pipeline requires zero opening costs");

  CkflLpResult lpres = solve_ckfl_lp(inst, opt);
  if (!lpres.feasible) throw ValidationError("relaxation infeasible: " + lpres.certificate);
  const FractionalSolution& frac = lpres.sol;

  Bundling b = build_bundles(inst, frac, ell);
  TransportPlan plan = transport_to_centers(inst, frac, b);

  std::vector<ConsolidatedStar> cons;
  cons.reserve(b.stars.size());
  Rat move_total = 0;
  for (const StarInstance& star : b.stars) {
    StarExtreme ex = star_extreme_point(inst, star, opt);
    cons.push_back(consolidate_star(inst, star, ex, eps));
    move_total += cons.back().move_cost;
  }

  Rat budget_total = 0;
  for (const StarInstance& star : b.stars) budget_total += star.b();
  if (move_total > (Rat(2) + Rat(4) / eps) * budget_total)
    audit_fail("total redistribution above (2+4/eps) * sum b_j");

  LeveledSolution lev = build_interval_solution(inst, frac, b, plan, cons, eps);
  SnappedSolution snap = snap_levels(inst, lev, ell, static_cast<int>(inst.k));
  FacilityForest forest = build_facility_forest(inst, snap);
  StarCut cut = decompose_forest(inst, snap, forest);
  RoundOutcome ro = round_facility_stars(inst, snap, cut, lev, eps, ell);

  // Cost chain: closing mass against the interval solution, then against the
  // direct cost, exactly as the final bound composes them.
  Rat t_pre = 0;
  for (int i = 0; i < inst.m; ++i)
    if (is_frac(lev.y[i]) && snap.s[i] >= 0)
      t_pre += (Rat(1) - lev.y[i]) * lev.demand[i] * inst.dist_ff(snap.s[i], i);
  if (t_pre > Rat(2) * lev.direct_cost) audit_fail("closing mass above twice the direct cost");
  Rat s_hat = 0;
  for (int i : snap.n2) s_hat += lev.demand[i] * inst.dist_ff(snap.s[i], i);
  if (s_hat > Rat(ell) * t_pre) audit_fail("snapped closing mass above ell times the pre-snap one");
  if (ro.charged > Rat(4 * ell) * lev.direct_cost)
    audit_fail("rerouting above 4*ell times the direct cost");

  const Rat direct_bound =
      ((Rat(2) + Rat(4) / eps) * Rat(1 + 2 * ell) + Rat(2 + 2 * ell)) * frac.value;
  if (lev.direct_cost > direct_bound) audit_fail("direct cost above its LP multiple");

  NonuniformResult res;
  res.lp_value = frac.value;
  res.gamma = Rat(3) + Rat(3) * eps;
  res.cost_bound = Rat(4 * ell + 1) * direct_bound;
  res.cost_bound_stated = (Rat(96) + Rat(180) / eps) * frac.value;
  res.centers = static_cast<int>(b.centers.size());
  res.lp_pivots = static_cast<int>(frac.pivots);
  res.transport_cost = plan.total_cost;
  res.consolidate_cost = move_total;
  res.snap_cost = s_hat;
  res.round_cost = ro.charged;

  // The constructive witness: every facility's share of the interval
  // assignment rides along its rounding destination.
  std::vector<std::vector<Rat>> wx(inst.m, std::vector<Rat>(inst.n, Rat(0)));
  for (int i = 0; i < inst.m; ++i) {
    if (lev.y[i] == 0) continue;
    const int t = ro.target[i];
    for (int j = 0; j < inst.n; ++j)
      if (lev.x[i][j] != 0) wx[t][j] += lev.x[i][j];
  }
  res.witness_cost = 0;
  for (int i = 0; i < inst.m; ++i)
    for (int j = 0; j < inst.n; ++j)
      if (wx[i][j] != 0) res.witness_cost += wx[i][j] * inst.dist_fc(i, j);
  if (res.witness_cost > lev.direct_cost + ro.charged)
    audit_fail("witness cost above direct plus rerouted");
  if (res.witness_cost > res.cost_bound) audit_fail("witness cost above the final bound");

  std::vector<int> open;
  for (int i = 0; i < inst.m; ++i)
    if (ro.open[i]) open.push_back(i);
  if (static_cast<long long>(open.size()) > inst.k) audit_fail("more than k open facilities");

  AssignmentResult flow = min_cost_assignment(inst, open, res.gamma);
  if (!flow.feasible) audit_fail("final flow infeasible despite a feasible witness");
  if (flow.cost > res.witness_cost) audit_fail("optimal flow above the witness cost");
  res.flow_cost = flow.cost;

  res.sol.open = open;
  res.sol.x = std::move(flow.x);
  res.stats = eval_solution(inst, res.sol);
  if (!res.stats.assignment_ok) audit_fail("final assignment fails basic checks");
  if (res.stats.max_violation > res.gamma) audit_fail("final violation above 3+3eps");
  if (res.stats.total_cost > res.cost_bound) audit_fail("final cost above the LP multiple");
  return res;
}

}  // namespace capkm
