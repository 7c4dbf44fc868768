#include "capkm/kfl_uniform.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <stdexcept>
#include <string>
#include <tuple>

#include "capkm/depround.hpp"
#include "capkm/oracle.hpp"
#include "capkm/rng.hpp"

namespace capkm {

namespace {

[[noreturn]] void audit_fail(const std::string& what) {
  throw std::logic_error("uniform audit: " + what);
}

bool is_frac(const Rat& v) { return v > 0 && v < 1; }

long long ucap(const Instance& inst) { return inst.cap[0]; }

// Open facilities per star, ascending facility id within each star.
std::vector<std::vector<int>> open_by_star(const StarForest& f, const std::vector<char>& fac_open) {
  std::vector<std::vector<int>> opens(f.nodes.size());
  for (std::size_t c = 0; c < f.nodes.size(); ++c)
    for (int i : f.bundles.stars[c].fac)
      if (fac_open[i]) opens[c].push_back(i);
  return opens;
}

}  // namespace

ShortForest short_trees(const Instance& inst, const std::vector<int>& centers) {
  const int s = static_cast<int>(centers.size());
  if (s < 1) audit_fail("empty center set");
  ShortForest f;
  f.parent.assign(s, -1);
  if (s == 1) return f;

  for (int c = 0; c < s; ++c) {
    int best = -1;
    for (int o = 0; o < s; ++o) {
      if (o == c) continue;
      if (best < 0) {
        best = o;
        continue;
      }
      const Rat dn = inst.dist_cc(centers[c], centers[o]);
      const Rat db = inst.dist_cc(centers[c], centers[best]);
      if (dn < db) best = o;
    }
    f.parent[c] = best;
  }

  // Mutual pairs lose the edge out of the lower-index node, which becomes
  // the root of its tree.
  for (int c = 0; c < s; ++c) {
    const int p = f.parent[c];
    if (p >= 0 && f.parent[p] == c && c < p) f.parent[c] = -1;
  }

  for (int c = 0; c < s; ++c) {
    // No cycle survives the (distance, index) tie-break; walking up must
    // reach a root within s steps.
    int v = c;
    for (int steps = 0; f.parent[v] >= 0; ++steps) {
      if (steps > s) audit_fail("cycle in the short forest");
      v = f.parent[v];
    }
    // Consecutive edges never grow toward the root.
    const int p = f.parent[c];
    if (p >= 0 && f.parent[p] >= 0) {
      const Rat lower = inst.dist_cc(centers[c], centers[p]);
      const Rat upper = inst.dist_cc(centers[p], centers[f.parent[p]]);
      if (lower < upper) audit_fail("short edge grows toward the root");
    }
  }
  return f;
}

StarForest build_star_forest(const Instance& inst, const FractionalSolution& frac,
                             Bundling bundles) {
  if (!inst.uniform_caps()) throw ValidationError("uniform capacities required");
  const Rat u = rat_ll(ucap(inst));
  const int s = static_cast<int>(bundles.centers.size());

  StarForest f;
  f.nodes.assign(s, StarTreeNode{});

  const ShortForest sf = short_trees(inst, bundles.centers);

  for (int c = 0; c < s; ++c) {
    const StarInstance& star = bundles.stars[c];
    StarTreeNode& nd = f.nodes[c];

    const std::vector<Rat> z0 = star_initial_solution(inst, frac, star);
    nd.z = star_almost_integral(inst, star, z0);

    Rat vol = 0;
    int positives = 0;
    int pos_at = -1;
    for (std::size_t a = 0; a < nd.z.size(); ++a) {
      vol += nd.z[a];
      if (nd.z[a] > 0) {
        ++positives;
        pos_at = static_cast<int>(a);
      }
    }

    // A star whose opening volume falls short of min(1, bundle volume) is a
    // single-support star; its one opening is padded up so that property
    // (iii), volume >= 1 - 1/ell, always holds.
    Rat target = star.vol_f;
    const Rat one = 1;
    if (one < target) target = one;
    if (vol < target) {
      if (positives > 1) audit_fail("low-volume opening with several facilities");
      int slot = pos_at;
      if (slot < 0) {
        // No demand reached this star; open the cheapest facility slot.
        for (std::size_t a = 0; a < star.fac.size(); ++a) {
          if (slot < 0) {
            slot = static_cast<int>(a);
            continue;
          }
          const Rat ka = inst.dist_fc(star.fac[a], star.center) * u + inst.fcost[star.fac[a]];
          const Rat kb =
              inst.dist_fc(star.fac[slot], star.center) * u + inst.fcost[star.fac[slot]];
          if (ka < kb || (ka == kb && star.fac[a] < star.fac[slot]))
            slot = static_cast<int>(a);
        }
      }
      nd.z[slot] = target;
      vol = target;
    }

    nd.vol = vol;
    nd.w = star.w;
    nd.big = !(star.vol_f < one);
    nd.short_father = sf.parent[c];
    nd.ds = 0;
    if (nd.short_father >= 0)
      nd.ds = Rat(2) * inst.dist_cc(bundles.centers[c], bundles.centers[nd.short_father]);

    // Big stars must own an integrally open facility, small stars exactly
    // one fractional opening. Everything downstream leans on this split.
    bool has_one = false;
    int fr = 0, pos = 0;
    for (const Rat& zi : nd.z) {
      if (zi == 1) has_one = true;
      if (is_frac(zi)) ++fr;
      if (zi > 0) ++pos;
    }
    if (nd.big && !has_one) audit_fail("big star without an integral opening");
    if (!nd.big && !(fr == 1 && !has_one && pos == 1))
      audit_fail("small star is not single fractional support");
  }

  // Binarization: the closest son keeps its father, every other son points
  // to its next-closer brother. ds keeps the doubled short-father distance.
  std::vector<std::vector<int>> sons(s);
  for (int c = 0; c < s; ++c)
    if (sf.parent[c] >= 0) sons[sf.parent[c]].push_back(c);
  for (int p = 0; p < s; ++p) {
    std::sort(sons[p].begin(), sons[p].end(), [&](int a, int b) {
      const Rat da = inst.dist_cc(bundles.centers[a], bundles.centers[p]);
      const Rat db = inst.dist_cc(bundles.centers[b], bundles.centers[p]);
      if (da != db) return da < db;
      return a < b;
    });
    for (std::size_t t = 0; t < sons[p].size(); ++t)
      f.nodes[sons[p][t]].father = (t == 0) ? p : sons[p][t - 1];
  }

  std::vector<std::vector<int>> bsons(s);
  for (int c = 0; c < s; ++c) {
    if (f.nodes[c].father >= 0)
      bsons[f.nodes[c].father].push_back(c);
    else
      f.roots.push_back(c);
  }
  for (int v = 0; v < s; ++v) {
    auto& bs = bsons[v];
    if (bs.size() > 2) audit_fail("in-degree above two after binarization");
    std::sort(bs.begin(), bs.end(), [&](int a, int b) {
      if (f.nodes[a].ds != f.nodes[b].ds) return f.nodes[a].ds < f.nodes[b].ds;
      return a < b;
    });
    if (!bs.empty()) f.nodes[v].left = bs[0];
    if (bs.size() == 2) f.nodes[v].right = bs[1];
  }

  f.bundles = std::move(bundles);
  return f;
}

TreeDiagnostics verify_star_tree(const Instance& inst, const StarForest& forest, bool strict) {
  const auto& B = forest.bundles;
  const int s = static_cast<int>(forest.nodes.size());
  const Rat u = rat_ll(ucap(inst));
  TreeDiagnostics diag;

  // (ii) the stars partition the facility set.
  std::vector<int> seen(inst.m, 0);
  for (int c = 0; c < s; ++c)
    for (int i : B.stars[c].fac) ++seen[i];
  for (int i = 0; i < inst.m; ++i)
    if (seen[i] != 1) audit_fail("stars do not partition the facilities");

  const Rat floor_vol = Rat(B.ell - 1, B.ell);

  for (int c = 0; c < s; ++c) {
    const StarTreeNode& nd = forest.nodes[c];
    const StarInstance& star = B.stars[c];
    if (nd.z.size() != star.fac.size()) audit_fail("opening vector shape");

    Rat vol = 0, served = 0, budget = 0;
    int fr = 0, positives = 0, single = -1;
    for (std::size_t a = 0; a < nd.z.size(); ++a) {
      const Rat& zi = nd.z[a];
      if (zi < 0 || zi > 1) audit_fail("opening outside [0,1]");
      if (is_frac(zi)) ++fr;
      if (zi > 0) {
        ++positives;
        single = static_cast<int>(a);
      }
      vol += zi;
      served += zi * u;
      budget += (inst.fcost[star.fac[a]] + inst.dist_fc(star.fac[a], star.center) * u) * zi;
    }
    // (i) almost integral and demand-feasible.
    if (fr > 1) audit_fail("more than one fractional opening");
    if (served < nd.w) audit_fail("opening cannot carry the star demand");
    if (vol != nd.vol) audit_fail("cached volume mismatch");
    // (iii) plus the upper bound that the k-count argument needs.
    if (vol < floor_vol) audit_fail("volume below 1 - 1/ell");
    if (star.vol_f < vol) audit_fail("volume above the bundle volume");
    if (nd.big != !(star.vol_f < Rat(1))) audit_fail("big flag mismatch");
    // The star budget holds when the LP saturates the bundle capacity; a
    // low-demand bundle may miss it after padding, so outside strict mode
    // it is only counted.
    if (budget > star.b()) {
      if (strict) audit_fail("star budget exceeded");
      ++diag.budget_fail;
    }

    // (v) in-degrees, and the left/right order.
    if (nd.left >= 0 && forest.nodes[nd.left].father != c) audit_fail("left son link");
    if (nd.right >= 0 && forest.nodes[nd.right].father != c) audit_fail("right son link");
    if (nd.right >= 0 && nd.left < 0) audit_fail("right son without left son");
    if (nd.left >= 0 && nd.right >= 0) {
      const StarTreeNode& a = forest.nodes[nd.left];
      const StarTreeNode& b = forest.nodes[nd.right];
      if (b.ds < a.ds || (b.ds == a.ds && nd.right < nd.left)) audit_fail("son order");
    }
    if (nd.father < 0 && nd.right >= 0) audit_fail("root with two sons");

    if (nd.father >= 0) {
      // Metric domination and (vi) monotonicity along the tree.
      const Rat direct = inst.dist_cc(B.centers[c], B.centers[nd.father]);
      if (nd.ds < direct) audit_fail("ds below the true distance");
      if (forest.nodes[nd.father].father >= 0 && nd.ds < forest.nodes[nd.father].ds)
        audit_fail("ds grows toward the root");
    } else if (nd.ds != 0) {
      audit_fail("root with a father distance");
    }

    // (iv) and its h-hop extension for single-support stars. Like the star
    // budget this needs saturated demand, so it is diagnostic by default.
    if (nd.father >= 0 && positives == 1) {
      const Rat gap = (Rat(1) - nd.z[single]) * u;
      Rat len = 0;
      int v = c, h = 0;
      bool bad = false;
      while (forest.nodes[v].father >= 0) {
        len += forest.nodes[v].ds;
        ++h;
        if (gap * len > Rat(16 * h) * star.b_c) {
          bad = true;
          break;
        }
        v = forest.nodes[v].father;
      }
      if (bad) {
        if (strict) audit_fail("reroute bound exceeded");
        ++diag.reroute_fail;
      }
    }

    // Forest shape: every node reaches a root.
    int v = c;
    for (int steps = 0; forest.nodes[v].father >= 0; ++steps) {
      if (steps > s) audit_fail("cycle in the binary forest");
      v = forest.nodes[v].father;
    }
  }
  return diag;
}

std::vector<std::pair<int, int>> make_matching(const StarForest& forest) {
  const int s = static_cast<int>(forest.nodes.size());

  // Fragments: delete big-star nodes, keep surviving sons ordered as before.
  std::vector<int> fl(s, -1), fr(s, -1);
  std::vector<int> frag_roots;
  for (int v = 0; v < s; ++v) {
    if (forest.nodes[v].big) continue;
    const int p = forest.nodes[v].father;
    if (p < 0 || forest.nodes[p].big) frag_roots.push_back(v);
    std::vector<int> kept;
    for (int son : {forest.nodes[v].left, forest.nodes[v].right})
      if (son >= 0 && !forest.nodes[son].big) kept.push_back(son);
    if (!kept.empty()) fl[v] = kept[0];
    if (kept.size() == 2) fr[v] = kept[1];
  }

  std::vector<std::pair<int, int>> pairs;
  std::vector<char> used(s, 0);
  auto leaf = [&](int v) { return v >= 0 && fl[v] < 0 && fr[v] < 0; };
  std::function<void(int)> mm = [&](int j) {
    const int jl = fl[j];
    if (jl < 0) return;
    pairs.emplace_back(jl, j);
    if (used[jl] || used[j]) audit_fail("node matched twice");
    used[jl] = used[j] = 1;
    if (fr[j] >= 0) mm(fr[j]);
    if (leaf(fl[jl]) && leaf(fr[jl])) {
      pairs.emplace_back(fl[jl], fr[jl]);
      if (used[fl[jl]] || used[fr[jl]]) audit_fail("node matched twice");
      used[fl[jl]] = used[fr[jl]] = 1;
    } else {
      if (fl[jl] >= 0) mm(fl[jl]);
      if (fr[jl] >= 0) mm(fr[jl]);
    }
  };
  for (int r : frag_roots) mm(r);

  for (const auto& [a, b] : pairs)
    if (forest.nodes[a].big || forest.nodes[b].big) audit_fail("big star matched");
  return pairs;
}

Match6Routing apply_match6(const Instance& inst, const StarForest& forest,
                           const std::vector<char>& fac_open) {
  const auto& nodes = forest.nodes;
  const int s = static_cast<int>(nodes.size());
  const Rat u = rat_ll(ucap(inst));
  const auto opens = open_by_star(forest, fac_open);

  Match6Routing r;
  r.dest.assign(s, -1);
  r.hops.assign(s, 0);

  for (int c = 0; c < s; ++c) {
    if (nodes[c].big && opens[c].empty()) audit_fail("closed big star");
    if (!opens[c].empty()) {
      r.dest[c] = c;
      continue;
    }
    // Closed small star: first open among father, left brother, grandfather
    // (the left son for a closed root).
    std::vector<std::pair<int, int>> cand;
    const int fa = nodes[c].father;
    if (fa < 0) {
      if (nodes[c].left >= 0) cand.emplace_back(nodes[c].left, 1);
    } else {
      cand.emplace_back(fa, 1);
      if (nodes[fa].right == c && nodes[fa].left >= 0) cand.emplace_back(nodes[fa].left, 2);
      if (nodes[fa].father >= 0) cand.emplace_back(nodes[fa].father, 2);
    }
    for (const auto& [v, h] : cand) {
      if (!opens[v].empty()) {
        r.dest[c] = v;
        r.hops[c] = h;
        break;
      }
    }
    if (r.dest[c] < 0 && nodes[c].w > 0) audit_fail("no open routing target");
  }

  std::vector<Rat> pooled(s, Rat(0));
  for (int c = 0; c < s; ++c) {
    if (nodes[c].w == 0) continue;
    if (r.hops[c] > 2) audit_fail("routing beyond two hops");
    pooled[r.dest[c]] += nodes[c].w;
  }

  r.fac_load.assign(inst.m, Rat(0));
  const Rat cap6 = Rat(6) * u;
  for (int c = 0; c < s; ++c) {
    if (pooled[c] == 0) continue;
    const Rat share = pooled[c] / Rat(static_cast<int>(opens[c].size()));
    if (share > cap6) audit_fail("load above six times the capacity");
    for (int i : opens[c]) r.fac_load[i] = share;
  }
  return r;
}

GroupedTree build_groups(const StarForest& forest, int ell) {
  if (ell < 2) throw ValidationError("ell must be at least 2");
  const auto& nodes = forest.nodes;
  const int s = static_cast<int>(nodes.size());

  std::vector<int> depth(s, 0);
  std::vector<std::vector<int>> sons(s);
  for (int v = 0; v < s; ++v)
    if (nodes[v].father >= 0) sons[nodes[v].father].push_back(v);
  std::vector<int> order(s);
  for (int v = 0; v < s; ++v) order[v] = v;
  // Depth by walking up; trees are shallow at desk scale.
  for (int v = 0; v < s; ++v) {
    int w = v;
    while (nodes[w].father >= 0) {
      ++depth[v];
      w = nodes[w].father;
    }
  }
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (depth[a] != depth[b]) return depth[a] < depth[b];
    return a < b;
  });

  GroupedTree gt;
  gt.group_of.assign(s, -1);

  for (int root : order) {
    if (gt.group_of[root] >= 0) continue;
    const int g = static_cast<int>(gt.chains.size());
    std::vector<int> chain{root};
    gt.group_of[root] = g;
    while (static_cast<int>(chain.size()) < ell) {
      int best = -1;
      for (int v : chain) {
        for (int son : sons[v]) {
          if (gt.group_of[son] >= 0) continue;
          if (best < 0 || nodes[son].ds < nodes[best].ds ||
              (nodes[son].ds == nodes[best].ds && son < best))
            best = son;
        }
      }
      if (best < 0) break;
      chain.push_back(best);
      gt.group_of[best] = g;
    }
    gt.chains.push_back(std::move(chain));
    const int fa = nodes[root].father;
    if (fa < 0) {
      gt.parent_group.push_back(-1);
    } else {
      if (gt.group_of[fa] < 0) audit_fail("group root with ungrouped father");
      gt.parent_group.push_back(gt.group_of[fa]);
    }
  }

  // A group that still had ungrouped sons below it would have grown, so a
  // group with children is always full. Child counts stay within ell+1.
  const int G = static_cast<int>(gt.chains.size());
  std::vector<int> child_cnt(G, 0);
  for (int g = 0; g < G; ++g)
    if (gt.parent_group[g] >= 0) ++child_cnt[gt.parent_group[g]];
  for (int g = 0; g < G; ++g) {
    if (child_cnt[g] > 0 && static_cast<int>(gt.chains[g].size()) != ell)
      audit_fail("non-leaf group below size ell");
    if (child_cnt[g] > ell + 1) audit_fail("more than ell+1 child groups");
  }

  // Edge monotonicity between a group and its children.
  for (int g = 0; g < G; ++g) {
    const int p = gt.parent_group[g];
    if (p < 0) continue;
    const Rat& connect = nodes[gt.chains[g][0]].ds;
    for (int v : gt.chains[p])
      if (nodes[v].father >= 0 && gt.group_of[nodes[v].father] == p && connect < nodes[v].ds)
        audit_fail("parent group edge above the connecting edge");
    for (int v : gt.chains[g])
      if (nodes[v].father >= 0 && gt.group_of[nodes[v].father] == g && nodes[v].ds < connect)
        audit_fail("child group edge below the connecting edge");
  }
  return gt;
}

GroupRouting route_groups(const Instance& inst, const StarForest& forest,
                          const GroupedTree& groups, const std::vector<char>& fac_open,
                          const Rat& gamma) {
  const auto& nodes = forest.nodes;
  const int G = static_cast<int>(groups.chains.size());
  const Rat u = rat_ll(ucap(inst));
  const Rat cap = gamma * u;
  const auto opens = open_by_star(forest, fac_open);

  GroupRouting r;
  r.fac_load.assign(inst.m, Rat(0));
  r.forwarded.assign(G, Rat(0));
  std::vector<std::deque<std::pair<int, Rat>>> inflow(G);

  // Groups were created parents first, so a reverse scan runs every child
  // before its parent.
  for (int g = G - 1; g >= 0; --g) {
    const auto& chain = groups.chains[g];
    const int inflow_node = chain.back();

    std::vector<int> sweep(chain.rbegin(), chain.rend());
    if (groups.parent_group[g] < 0 && chain.size() >= 2) {
      const int root = chain[0];
      if (!nodes[root].big && opens[root].empty()) {
        // The tree root and its unique son came out of one short-tree
        // 2-cycle, and their paired rounding keeps one of them open. Let
        // the open one close the sweep.
        if (opens[chain[1]].empty()) audit_fail("root pair fully closed");
        std::swap(sweep[sweep.size() - 1], sweep[sweep.size() - 2]);
      }
    }

    std::deque<std::pair<int, Rat>> q;
    for (int v : sweep) {
      if (v == inflow_node)
        for (auto& e : inflow[g]) q.push_back(std::move(e));

      if (nodes[v].big) {
        // Big stars serve themselves before anything pooled.
        Rat left = nodes[v].w;
        for (int i : opens[v]) {
          if (left == 0) break;
          Rat room = cap - r.fac_load[i];
          if (room <= 0) continue;
          const Rat amt = left < room ? left : room;
          r.moves.emplace_back(v, i, amt);
          r.fac_load[i] += amt;
          left -= amt;
        }
        if (left > 0) audit_fail("big star demand does not fit");
      } else if (nodes[v].w > 0) {
        q.emplace_back(v, nodes[v].w);
      }

      for (int i : opens[v]) {
        Rat room = cap - r.fac_load[i];
        while (room > 0 && !q.empty()) {
          auto& [src, amt] = q.front();
          const Rat take = amt < room ? amt : room;
          r.moves.emplace_back(src, i, take);
          r.fac_load[i] += take;
          room -= take;
          amt -= take;
          if (amt == 0) q.pop_front();
        }
      }
    }

    Rat fwd = 0;
    for (const auto& [src, amt] : q) fwd += amt;
    r.forwarded[g] = fwd;
    const int p = groups.parent_group[g];
    if (p < 0) {
      if (fwd > 0) audit_fail("demand stranded at a root group");
    } else {
      if (fwd > u) audit_fail("group forwards more than u");
      for (auto& e : q) inflow[p].push_back(std::move(e));
    }
  }

  // Nothing lost, and every move lands in the source's own group or its
  // parent group.
  Rat total_served = 0, total_demand = 0;
  for (const auto& nd : nodes) total_demand += nd.w;
  for (const auto& mv : r.moves) {
    const int src = std::get<0>(mv);
    const int fac = std::get<1>(mv);
    const int dst = forest.bundles.owner[fac];
    const int sg = groups.group_of[src];
    if (groups.group_of[dst] != sg && groups.group_of[dst] != groups.parent_group[sg])
      audit_fail("move outside group and parent group");
    total_served += std::get<2>(mv);
  }
  if (total_served != total_demand) audit_fail("routed demand mismatch");
  return r;
}

namespace {

struct UniformContext {
  CkflLpResult lp;
  TransportPlan plan;
  StarForest forest;
  TreeDiagnostics diag;
};

UniformContext uniform_context(const Instance& inst, int ell, const SimplexOptions& opt) {
  validate_instance(inst);
  if (!inst.uniform_caps()) throw ValidationError("uniform capacities required");
  UniformContext ctx;
  ctx.lp = solve_ckfl_lp(inst, opt);
  if (!ctx.lp.feasible)
    throw ValidationError("relaxation infeasible: " + ctx.lp.certificate);
  Bundling b = build_bundles(inst, ctx.lp.sol, ell);
  ctx.plan = transport_to_centers(inst, ctx.lp.sol, b);
  ctx.forest = build_star_forest(inst, ctx.lp.sol, std::move(b));
  ctx.diag = verify_star_tree(inst, ctx.forest, false);
  return ctx;
}

// Witness assignment: every client's transported mass follows its center's
// demand split. Columns must sum to one and loads must match the routing.
Rat witness_connection(const Instance& inst, const TransportPlan& plan,
                       const std::vector<std::vector<std::pair<int, Rat>>>& split) {
  const int n = inst.n, m = inst.m;
  std::vector<std::vector<Rat>> wx(m, std::vector<Rat>(n, Rat(0)));
  for (std::size_t c = 0; c < split.size(); ++c) {
    if (split[c].empty()) continue;
    for (int j = 0; j < n; ++j) {
      const Rat& mass = plan.moved[c][j];
      if (mass == 0) continue;
      for (const auto& [fac, frac] : split[c]) wx[fac][j] += mass * frac;
    }
  }
  Rat cost = 0;
  for (int j = 0; j < n; ++j) {
    Rat col = 0;
    for (int i = 0; i < m; ++i) {
      col += wx[i][j];
      cost += wx[i][j] * inst.dist_fc(i, j);
    }
    if (col != 1) audit_fail("witness does not serve a client fully");
  }
  return cost;
}

UniformResult finish_uniform(const Instance& inst, const UniformContext& ctx,
                             const std::vector<char>& fac_open, const Rat& gamma,
                             const Rat& bound_factor, const Rat& witness_conn) {
  UniformResult res;
  res.lp_value = ctx.lp.sol.value;
  res.gamma = gamma;
  res.cost_bound = bound_factor * ctx.lp.sol.value;
  res.centers = static_cast<int>(ctx.forest.bundles.centers.size());
  res.trees = static_cast<int>(ctx.forest.roots.size());
  res.budget_diag = ctx.diag.budget_fail;
  res.reroute_diag = ctx.diag.reroute_fail;
  res.lp_pivots = ctx.lp.sol.pivots;

  Rat open_cost = 0;
  for (int i = 0; i < inst.m; ++i)
    if (fac_open[i]) {
      res.sol.open.push_back(i);
      open_cost += inst.fcost[i];
    }
  if (static_cast<long long>(res.sol.open.size()) > inst.k)
    audit_fail("more than k facilities opened");

  const AssignmentResult flow = min_cost_assignment(inst, res.sol.open, gamma);
  if (!flow.feasible) audit_fail("final flow infeasible");
  if (flow.cost > witness_conn) audit_fail("flow above its witness");
  res.sol.x = flow.x;
  res.witness_cost = witness_conn + open_cost;
  res.transport_cost = ctx.plan.total_cost;
  res.routing_cost = witness_conn;
  res.flow_cost = flow.cost;

  res.stats = eval_solution(inst, res.sol);
  if (!res.stats.assignment_ok) audit_fail("assignment check failed");
  if (res.stats.max_violation > gamma) audit_fail("violation above gamma");
  if (res.stats.total_cost > res.cost_bound) audit_fail("cost above the stated bound");
  if (res.witness_cost > res.cost_bound) audit_fail("witness above the stated bound");
  return res;
}

}  // namespace

UniformResult solve_kfl_match6(const Instance& inst, std::uint64_t seed,
                               const SimplexOptions& opt) {
  const int ell = 2;
  UniformContext ctx = uniform_context(inst, ell, opt);
  const auto& nodes = ctx.forest.nodes;
  const int s = static_cast<int>(nodes.size());

  const auto matching = make_matching(ctx.forest);

  // Rounding vector: one fractional opening per small star.
  std::vector<int> vec_fac;
  std::vector<Rat> vec_val;
  std::vector<int> slot(s, -1);
  for (int c = 0; c < s; ++c) {
    if (nodes[c].big) continue;
    for (std::size_t a = 0; a < nodes[c].z.size(); ++a) {
      if (nodes[c].z[a] > 0) {
        slot[c] = static_cast<int>(vec_fac.size());
        vec_fac.push_back(ctx.forest.bundles.stars[c].fac[a]);
        vec_val.push_back(nodes[c].z[a]);
      }
    }
  }

  std::vector<char> open01;
  if (s == 1 && !nodes[0].big) {
    // A single small star has no tree partner; open it outright.
    open01.assign(1, 1);
  } else {
    Schedule sched;
    sched.kind = ScheduleKind::PairsFirst;
    for (const auto& [a, b] : matching) sched.pairs.emplace_back(slot[a], slot[b]);
    Rng rng(seed);
    open01 = dependent_round(vec_val, sched, rng);
  }

  for (const auto& [a, b] : matching)
    if (!open01[slot[a]] && !open01[slot[b]]) audit_fail("matched pair fully closed");

  std::vector<char> fac_open(inst.m, 0);
  for (int c = 0; c < s; ++c) {
    if (nodes[c].big) {
      for (std::size_t a = 0; a < nodes[c].z.size(); ++a)
        if (nodes[c].z[a] == 1) fac_open[ctx.forest.bundles.stars[c].fac[a]] = 1;
    } else if (open01[slot[c]]) {
      fac_open[vec_fac[slot[c]]] = 1;
    }
  }

  const Match6Routing routing = apply_match6(inst, ctx.forest, fac_open);
  const auto opens = open_by_star(ctx.forest, fac_open);

  std::vector<std::vector<std::pair<int, Rat>>> split(s);
  for (int c = 0; c < s; ++c) {
    if (nodes[c].w == 0 || routing.dest[c] < 0) continue;
    const auto& at = opens[routing.dest[c]];
    const Rat frac = Rat(1) / Rat(static_cast<int>(at.size()));
    for (int i : at) split[c].emplace_back(i, frac);
  }
  const Rat witness_conn = witness_connection(inst, ctx.plan, split);

  UniformResult res = finish_uniform(inst, ctx, fac_open, Rat(6), Rat(196), witness_conn);
  res.matched_pairs = static_cast<int>(matching.size());
  return res;
}

UniformResult solve_kfl_group(const Instance& inst, int ell, std::uint64_t seed,
                              const SimplexOptions& opt) {
  if (ell < 2) throw ValidationError("ell must be at least 2");
  UniformContext ctx = uniform_context(inst, ell, opt);
  const auto& nodes = ctx.forest.nodes;
  const int s = static_cast<int>(nodes.size());

  const GroupedTree groups = build_groups(ctx.forest, ell);
  const int G = static_cast<int>(groups.chains.size());

  // Rounding vector: the fractional opening of every star that has one,
  // chained per group from the group root downward.
  std::vector<int> vec_fac;
  std::vector<Rat> vec_val;
  std::vector<int> slot(s, -1);
  for (int c = 0; c < s; ++c) {
    for (std::size_t a = 0; a < nodes[c].z.size(); ++a) {
      if (is_frac(nodes[c].z[a])) {
        slot[c] = static_cast<int>(vec_fac.size());
        vec_fac.push_back(ctx.forest.bundles.stars[c].fac[a]);
        vec_val.push_back(nodes[c].z[a]);
      }
    }
  }

  Schedule sched;
  sched.kind = ScheduleKind::GroupChains;
  for (int g = 0; g < G; ++g) {
    std::vector<int> chain;
    for (int v : groups.chains[g])
      if (slot[v] >= 0) chain.push_back(slot[v]);
    sched.chains.push_back(std::move(chain));
  }

  std::vector<char> open01;
  if (s == 1 && !nodes[0].big) {
    open01.assign(vec_val.size(), 1);
  } else {
    Rng rng(seed);
    open01 = dependent_round(vec_val, sched, rng);
  }

  // Per chain the rounding preserves the opening sum up to the one entry
  // that crossed chains.
  std::vector<int> child_cnt(G, 0);
  for (int g = 0; g < G; ++g)
    if (groups.parent_group[g] >= 0) ++child_cnt[groups.parent_group[g]];
  for (int g = 0; g < G; ++g) {
    Rat before = 0;
    int after = 0, ones = 0;
    for (int v : groups.chains[g]) {
      for (const Rat& zi : nodes[v].z)
        if (zi == 1) ++ones;
      if (slot[v] >= 0) {
        before += vec_val[slot[v]];
        after += open01[slot[v]] ? 1 : 0;
      }
    }
    Rat drift = Rat(after) - before;
    if (drift < 0) drift = -drift;
    if (drift >= 1) audit_fail("chain opening sum drifted");
    if (child_cnt[g] > 0 && ones + after < ell - 1)
      audit_fail("non-leaf group with fewer than ell-1 openings");
  }

  std::vector<char> fac_open(inst.m, 0);
  for (int c = 0; c < s; ++c)
    for (std::size_t a = 0; a < nodes[c].z.size(); ++a) {
      if (nodes[c].z[a] == 1)
        fac_open[ctx.forest.bundles.stars[c].fac[a]] = 1;
      else if (is_frac(nodes[c].z[a]) && open01[slot[c]])
        fac_open[vec_fac[slot[c]]] = 1;
    }

  const Rat gamma = Rat(2) + rat_frac(3, ell - 1);
  const GroupRouting routing = route_groups(inst, ctx.forest, groups, fac_open, gamma);

  std::vector<std::vector<std::pair<int, Rat>>> split(s);
  for (const auto& mv : routing.moves) {
    const int src = std::get<0>(mv);
    split[src].emplace_back(std::get<1>(mv), std::get<2>(mv) / nodes[src].w);
  }

  const Rat witness_conn = witness_connection(inst, ctx.plan, split);
  const long long lell = ell;
  const Rat factor = rat_ll(32 * lell * lell + 28 * lell + 7);

  UniformResult res = finish_uniform(inst, ctx, fac_open, gamma, factor, witness_conn);
  res.groups = G;
  return res;
}

}  // namespace capkm
