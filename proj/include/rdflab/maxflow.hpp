#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <queue>
#include <vector>

namespace rdflab {

/// Dinic max flow with integer capacities.
class MaxFlow {
 public:
  static constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;

  explicit MaxFlow(int n) : graph_(static_cast<std::size_t>(n)), level_(graph_.size()), iter_(graph_.size()) {}

  int add_edge(int from, int to, std::int64_t cap) {
    graph_[from].push_back({to, static_cast<int>(graph_[to].size()), cap});
    graph_[to].push_back({from, static_cast<int>(graph_[from].size()) - 1, 0});
    return static_cast<int>(graph_[from].size()) - 1;
  }

  std::int64_t run(int s, int t) {
    std::int64_t flow = 0;
    while (bfs(s, t)) {
      std::fill(iter_.begin(), iter_.end(), 0);
      while (const std::int64_t f = dfs(s, t, kInf)) flow += f;
    }
    return flow;
  }

  // Vertices reachable from s in the residual graph after run().
  std::vector<char> source_side(int s) const {
    std::vector<char> seen(graph_.size(), 0);
    std::vector<int> stack = {s};
    seen[s] = 1;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (const auto& e : graph_[v])
        if (e.cap > 0 && !seen[e.to]) {
          seen[e.to] = 1;
          stack.push_back(e.to);
        }
    }
    return seen;
  }

 private:
  struct Edge {
    int to;
    int rev;
    std::int64_t cap;
  };

  bool bfs(int s, int t) {
    std::fill(level_.begin(), level_.end(), -1);
    std::queue<int> q;
    level_[s] = 0;
    q.push(s);
    while (!q.empty()) {
      const int v = q.front();
      q.pop();
      for (const auto& e : graph_[v])
        if (e.cap > 0 && level_[e.to] < 0) {
          level_[e.to] = level_[v] + 1;
          q.push(e.to);
        }
    }
    return level_[t] >= 0;
  }

  std::int64_t dfs(int v, int t, std::int64_t up) {
    if (v == t) return up;
    for (int& i = iter_[v]; i < static_cast<int>(graph_[v].size()); ++i) {
      Edge& e = graph_[v][i];
      if (e.cap <= 0 || level_[v] >= level_[e.to]) continue;
      const std::int64_t d = dfs(e.to, t, std::min(up, e.cap));
      if (d > 0) {
        e.cap -= d;
        graph_[e.to][e.rev].cap += d;
        return d;
      }
    }
    return 0;
  }

  std::vector<std::vector<Edge>> graph_;
  std::vector<int> level_;
  std::vector<int> iter_;
};

struct Antichain {
  std::int64_t weight = 0;
  std::vector<int> members;
};

/// Maximum-weight antichain of a strict partial order given by less(u, v),
/// which must be transitive. Weighted Dilworth: the antichain weight equals
/// the total weight minus a min cut in the split bipartite network.
template <class Less>
Antichain max_weight_antichain(const std::vector<std::int64_t>& weights, Less less) {
  const int n = static_cast<int>(weights.size());
  Antichain out;
  if (n == 0) return out;
  const int s = 2 * n, t = 2 * n + 1;
  MaxFlow mf(2 * n + 2);
  std::int64_t total = 0;
  for (int v = 0; v < n; ++v) {
    total += weights[v];
    mf.add_edge(s, v, weights[v]);
    mf.add_edge(n + v, t, weights[v]);
  }
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v)
      if (u != v && less(u, v)) mf.add_edge(u, n + v, MaxFlow::kInf);
  const std::int64_t cut = mf.run(s, t);
  out.weight = total - cut;
  const auto reach = mf.source_side(s);
  for (int v = 0; v < n; ++v)
    if (reach[v] && !reach[n + v]) out.members.push_back(v);
  return out;
}

}  // namespace rdflab
