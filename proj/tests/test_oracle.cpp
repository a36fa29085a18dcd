#include <cmath>

#include <gtest/gtest.h>

#include "llpt/oracle.hpp"

using namespace llpt;
using namespace llpt::oracle;

namespace {

const SpaceBounds kUnit({0, 0}, {1, 1});

struct Diamond {
  LazyGraph<> g{2};
  VertexId G, A, B, S;
  Diamond() {
    G = g.add_vertex({0.0, 0.0});
    A = g.add_vertex({0.1, std::sqrt(0.99)});
    B = g.add_vertex({4.0, 0.0});
    S = g.add_vertex({5.0, 0.0});
    g.add_edge(A, G);
    g.add_edge(B, G);
    g.add_edge(S, A);
    g.add_edge(S, B);
  }
};

WeightView table(std::vector<double> w) {
  return [w = std::move(w)](VertexId, VertexId, EdgeId e) { return w[e]; };
}

LazyGraph<> random_graph(Rng& rng, int n, double r) {
  LazyGraph<> g(2);
  for (int i = 0; i < n; ++i) g.connect_radius(g.add_vertex(sample_uniform(rng, kUnit)), r);
  return g;
}

}  // namespace

TEST(Dijkstra, SingleVertex) {
  LazyGraph<> g(2);
  g.add_vertex({0.5, 0.5});
  const auto sp = dijkstra(g, lazy_weights(g), 0);
  EXPECT_EQ(sp.cost[0], 0.0);
  EXPECT_EQ(sp.parent[0], kNoVertex);
}

TEST(Dijkstra, DiamondCostViaB) {
  Diamond d;
  const auto sp = dijkstra(d.g, lazy_weights(d.g), d.G, Direction::kToSource);
  EXPECT_NEAR(sp.cost[d.S], 5.0, 1e-12);
  EXPECT_EQ(*trace_path(sp, d.S), (std::vector<VertexId>{d.S, d.B, d.G}));
  EXPECT_NEAR(enumerate_shortest(d.g, lazy_weights(d.g), d.S, d.G), 5.0, 1e-12);
}

TEST(Dijkstra, MatchesEnumerationOnSmallGraphs) {
  Rng rng(21);
  for (int trial = 0; trial < 150; ++trial) {
    const int n = 2 + static_cast<int>(rng.next_u64() % 11);
    LazyGraph<> g = random_graph(rng, n, rng.uniform(0.2, 0.7));
    std::vector<double> w(g.edge_count());
    for (double& x : w) x = rng.uniform01() < 0.15 ? kInfinity : rng.uniform(0.0, 3.0);
    const WeightView wv = table(w);
    const auto sp = dijkstra(g, wv, 0);
    for (VertexId v = 0; v < g.vertex_count(); ++v) {
      const double brute = enumerate_shortest(g, wv, 0, v);
      if (brute == kInfinity) {
        EXPECT_EQ(sp.cost[v], kInfinity);
      } else {
        EXPECT_NEAR(sp.cost[v], brute, 1e-12 * std::max(1.0, brute));
      }
    }
  }
}

TEST(Dijkstra, OptimalityConditions) {
  Rng rng(22);
  for (int trial = 0; trial < 30; ++trial) {
    LazyGraph<> g = random_graph(rng, 120, 0.15);
    const auto sp = dijkstra(g, lazy_weights(g), 0);
    for (VertexId v = 0; v < g.vertex_count(); ++v) {
      for (const Neighbor& n : g.neighbors(v)) {
        EXPECT_LE(sp.cost[n.vertex], sp.cost[v] + lazy_weight(g.edge(n.edge)) + 1e-12);
      }
    }
  }
}

TEST(FixedPointLmc, BaseCases) {
  LazyGraph<> g(2);
  g.add_vertex({0, 0});
  g.add_vertex({1, 0});
  g.add_vertex({5, 5});
  g.add_edge(0, 1);
  const auto lmc = fixed_point_lmc(g, lazy_weights(g), 0);
  EXPECT_EQ(lmc[0], 0.0);
  EXPECT_EQ(lmc[1], 1.0);
  EXPECT_EQ(lmc[2], kInfinity);
}

TEST(FixedPointLmc, AgreesWithDijkstraAndIsIdempotent) {
  Rng rng(23);
  for (int trial = 0; trial < 40; ++trial) {
    LazyGraph<> g = random_graph(rng, 80, 0.2);
    std::vector<double> w(g.edge_count());
    for (EdgeId e = 0; e < w.size(); ++e) w[e] = rng.uniform01() < 0.2 ? kInfinity : g.edge(e).what_if_free;
    const WeightView wv = table(w);
    const auto goal = static_cast<VertexId>(rng.next_u64() % g.vertex_count());
    const auto lmc = fixed_point_lmc(g, wv, goal);
    const auto sp = dijkstra(g, wv, goal, Direction::kToSource);
    for (VertexId v = 0; v < g.vertex_count(); ++v) {
      if (sp.cost[v] == kInfinity) {
        EXPECT_EQ(lmc[v], kInfinity);
      } else {
        EXPECT_NEAR(lmc[v], sp.cost[v], 1e-9 * std::max(1.0, sp.cost[v]));
      }
    }
    // One more sweep from the fixed point changes nothing.
    for (VertexId v = 0; v < g.vertex_count(); ++v) {
      if (v == goal) continue;
      double best = kInfinity;
      for (const Neighbor& n : g.neighbors(v)) best = std::min(best, wv(v, n.vertex, n.edge) + lmc[n.vertex]);
      EXPECT_EQ(best, lmc[v]);
    }
  }
}

TEST(FullEvalShortest, EmptyWorldEqualsLazyDijkstra) {
  Rng rng(24);
  LazyGraph<> g = random_graph(rng, 150, 0.15);
  const WorldSnapshot empty(kUnit, {});
  const auto full = full_eval_shortest(g, empty, 0.01, 1, 0);
  const auto sp = dijkstra(g, lazy_weights(g), 0, Direction::kToSource);
  EXPECT_EQ(full.cost, sp.cost[1]);
}

TEST(FullEvalShortest, BlockedGoalHasNoPath) {
  Rng rng(25);
  LazyGraph<> g(2);
  const VertexId goal = g.add_vertex({0.5, 0.5});
  const VertexId start = g.add_vertex({0.05, 0.05});
  for (int i = 0; i < 200; ++i) g.add_vertex(sample_uniform(rng, kUnit));
  for (VertexId v = 0; v < g.vertex_count(); ++v) g.connect_radius(v, 0.2);
  // A ring of boxes around the goal cuts every goal-incident edge.
  const WorldSnapshot w(kUnit, {Box{{0.35, 0.35}, {0.65, 0.4}}, Box{{0.35, 0.6}, {0.65, 0.65}},
                                Box{{0.35, 0.35}, {0.4, 0.65}}, Box{{0.6, 0.35}, {0.65, 0.65}}});
  const auto full = full_eval_shortest(g, w, 0.005, start, goal);
  EXPECT_EQ(full.cost, kInfinity);
  EXPECT_FALSE(full.path.has_value());
}

TEST(TrueWeights, LowerBoundedByLazy) {
  Rng rng(26);
  LazyGraph<> g = random_graph(rng, 100, 0.2);
  const WorldSnapshot w(kUnit, {Sphere{{0.5, 0.5}, 0.2}});
  const WeightView lazy = lazy_weights(g), truth = true_weights(g, w, 0.01);
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const EdgeRecord& r = g.edge(e);
    EXPECT_LE(lazy(r.u, r.v, e), truth(r.u, r.v, e));
  }
}
