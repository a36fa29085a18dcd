#pragma once

// Brute-force reference computations used to check the planners. Only the
// graph's read interface is used here; nothing depends on planner internals.

#include <cstddef>
#include <functional>
#include <optional>
#include <queue>
#include <utility>
#include <vector>

#include "llpt/lazy_graph.hpp"
#include "llpt/world.hpp"

namespace llpt::oracle {

/// Weight of traversing the directed edge from -> to (record id `e`).
using WeightView = std::function<double(VertexId from, VertexId to, EdgeId e)>;

template <class G>
concept GraphView = requires(const G g, VertexId v, EdgeId e) {
  { g.vertex_count() } -> std::convertible_to<std::size_t>;
  { g.neighbors(v) };
  { g.edge(e) } -> std::convertible_to<const EdgeRecord&>;
};

enum class Direction {
  kFromSource,  // cost[v] = cheapest source -> v
  kToSource,    // cost[v] = cheapest v -> source
};

struct ShortestPaths {
  std::vector<double> cost;
  std::vector<VertexId> parent;  // next hop toward the source
};

template <GraphView G>
ShortestPaths dijkstra(const G& graph, const WeightView& weights, VertexId source,
                       Direction dir = Direction::kFromSource) {
  const std::size_t n = graph.vertex_count();
  ShortestPaths sp{std::vector<double>(n, kInfinity), std::vector<VertexId>(n, kNoVertex)};
  std::vector<bool> done(n, false);
  using Item = std::pair<double, VertexId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
  sp.cost[source] = 0.0;
  open.push({0.0, source});
  while (!open.empty()) {
    const auto [c, x] = open.top();
    open.pop();
    if (done[x]) continue;
    done[x] = true;
    for (const auto& nb : graph.neighbors(x)) {
      const VertexId y = nb.vertex;
      const double w = dir == Direction::kFromSource ? weights(x, y, nb.edge) : weights(y, x, nb.edge);
      const double cand = c + w;
      if (cand < sp.cost[y]) {
        sp.cost[y] = cand;
        sp.parent[y] = x;
        open.push({cand, y});
      }
    }
  }
  return sp;
}

/// Follows next-hop pointers from `from` to the source of `sp`.
inline std::optional<std::vector<VertexId>> trace_path(const ShortestPaths& sp, VertexId from) {
  if (sp.cost[from] == kInfinity) return std::nullopt;
  std::vector<VertexId> path{from};
  VertexId cur = from;
  while (sp.parent[cur] != kNoVertex) {
    cur = sp.parent[cur];
    path.push_back(cur);
  }
  return path;
}

/// Value iteration to the exact fixed point of
/// lmc(goal) = 0, lmc(v) = min_u w(v, u) + lmc(u).
template <GraphView G>
std::vector<double> fixed_point_lmc(const G& graph, const WeightView& weights, VertexId goal) {
  const std::size_t n = graph.vertex_count();
  std::vector<double> lmc(n, kInfinity);
  lmc[goal] = 0.0;
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<double> next(n, kInfinity);
    next[goal] = 0.0;
    for (VertexId v = 0; v < n; ++v) {
      if (v == goal) continue;
      for (const auto& nb : graph.neighbors(v)) next[v] = std::min(next[v], weights(v, nb.vertex, nb.edge) + lmc[nb.vertex]);
    }
    for (VertexId v = 0; v < n; ++v) {
      if (next[v] != lmc[v]) changed = true;
    }
    lmc = std::move(next);
  }
  return lmc;
}

/// Minimum cost over every simple path from `from` to `to`, by exhaustive DFS.
/// Exponential; intended for graphs of a dozen vertices.
template <GraphView G>
double enumerate_shortest(const G& graph, const WeightView& weights, VertexId from, VertexId to) {
  std::vector<bool> on_path(graph.vertex_count(), false);
  double best = kInfinity;
  std::function<void(VertexId, double)> dfs = [&](VertexId x, double acc) {
    if (x == to) {
      best = std::min(best, acc);
      return;
    }
    on_path[x] = true;
    for (const auto& nb : graph.neighbors(x)) {
      if (on_path[nb.vertex]) continue;
      const double w = weights(x, nb.vertex, nb.edge);
      if (w == kInfinity) continue;
      dfs(nb.vertex, acc + w);
    }
    on_path[x] = false;
  };
  dfs(from, 0.0);
  return best;
}

template <GraphView G>
WeightView lazy_weights(const G& graph) {
  return [&graph](VertexId, VertexId, EdgeId e) { return lazy_weight(graph.edge(e)); };
}

/// True weights: every edge collision-checked against `world` up front.
template <GraphView G>
WeightView true_weights(const G& graph, const WorldSnapshot& world, double resolution) {
  std::vector<double> w(graph.edges().size());
  for (EdgeId e = 0; e < w.size(); ++e) {
    const EdgeRecord& r = graph.edge(e);
    w[e] = edge_in_collision(graph.coords(r.u), graph.coords(r.v), world, resolution) ? kInfinity : r.what_if_free;
  }
  return [w = std::move(w)](VertexId, VertexId, EdgeId e) { return w[e]; };
}

struct FullEvalResult {
  double cost = kInfinity;
  std::optional<std::vector<VertexId>> path;
};

/// Shortest start -> goal path once every edge has been checked against `world`.
template <GraphView G>
FullEvalResult full_eval_shortest(const G& graph, const WorldSnapshot& world, double resolution, VertexId start,
                                  VertexId goal) {
  const WeightView w = true_weights(graph, world, resolution);
  const ShortestPaths sp = dijkstra(graph, w, goal, Direction::kToSource);
  return {sp.cost[start], trace_path(sp, start)};
}

}  // namespace llpt::oracle
