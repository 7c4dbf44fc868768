#include "capkm/flow.hpp"

#include <limits>
#include <stdexcept>

namespace capkm {

int MinCostFlow::add_arc(int from, int to, Int cap, Rat cost) {
  if (cost < 0) throw std::invalid_argument("MinCostFlow: negative arc cost");
  if (cap < 0) throw std::invalid_argument("MinCostFlow: negative arc capacity");
  int id = static_cast<int>(arcs_.size()) / 2;
  arcs_.push_back(Arc{to, head_[from], cap, cap, cost});
  head_[from] = static_cast<int>(arcs_.size()) - 1;
  arcs_.push_back(Arc{from, head_[to], Int(0), Int(0), -cost});
  head_[to] = static_cast<int>(arcs_.size()) - 1;
  return id;
}

std::pair<Int, Rat> MinCostFlow::solve(int s, int t, const Int& want) {
  const int V = static_cast<int>(head_.size());
  std::vector<Rat> pot(V, Rat(0));
  Int shipped(0);
  Rat total_cost(0);

  std::vector<Rat> dist(V);
  std::vector<char> reached(V), done(V);
  std::vector<int> pre_arc(V);

  while (shipped < want) {
    // Dijkstra on reduced costs, dense node selection (graphs here are tiny)
    std::fill(reached.begin(), reached.end(), 0);
    std::fill(done.begin(), done.end(), 0);
    dist[s] = 0;
    reached[s] = 1;
    pre_arc[s] = -1;
    while (true) {
      int u = -1;
      for (int v = 0; v < V; ++v)
        if (reached[v] && !done[v] && (u < 0 || dist[v] < dist[u])) u = v;
      if (u < 0) break;
      done[u] = 1;
      for (int a = head_[u]; a >= 0; a = arcs_[a].next) {
        if (arcs_[a].cap == 0) continue;
        int v = arcs_[a].to;
        Rat nd = dist[u] + arcs_[a].cost + pot[u] - pot[v];
        if (!reached[v] || nd < dist[v]) {
          reached[v] = 1;
          dist[v] = nd;
          pre_arc[v] = a;
        }
      }
    }
    if (!reached[t]) break;
    for (int v = 0; v < V; ++v)
      if (reached[v]) pot[v] += dist[v];
    Int push = want - shipped;
    for (int a = pre_arc[t]; a >= 0;) {
      if (arcs_[a].cap < push) push = arcs_[a].cap;
      int u = arcs_[a ^ 1].to;
      a = (u == s) ? -1 : pre_arc[u];
    }
    for (int a = pre_arc[t]; a >= 0;) {
      arcs_[a].cap -= push;
      arcs_[a ^ 1].cap += push;
      total_cost += Rat(push) * arcs_[a].cost;
      int u = arcs_[a ^ 1].to;
      a = (u == s) ? -1 : pre_arc[u];
    }
    shipped += push;
  }
  return {shipped, total_cost};
}

}  // namespace capkm
