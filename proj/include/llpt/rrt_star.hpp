#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

#include "llpt/lazy_graph.hpp"
#include "llpt/state_space.hpp"
#include "llpt/world.hpp"

namespace llpt {

struct RrtStarParams {
  double delta = 0.1;
  double gamma_s = 1.0;
  double resolution = 0.01;
};

struct RrtStarResult {
  double cost = kInfinity;
  std::optional<std::vector<Config>> path;  // start ... goal
  std::uint64_t edge_evaluations = 0;
  std::size_t tree_size = 0;
};

/// Start-rooted RRT* with r-disk rewiring and eager collision checks on every
/// candidate edge. The goal joins the tree the first time a new vertex lands
/// within the connection radius of it, then takes part in rewiring like any
/// other vertex.
template <Metric M = EuclideanMetric>
class RrtStar {
 public:
  RrtStar(SpaceBounds bounds, Config start, Config goal, RrtStarParams params, std::uint64_t seed, M metric = M{})
      : bounds_(std::move(bounds)), goal_config_(std::move(goal)), params_(params), metric_(metric),
        index_(metric), rng_(seed) {
    if (!(params_.delta > 0.0) || !(params_.gamma_s > 0.0)) throw ContractViolation("delta, gamma_s must be > 0");
    add_node(std::move(start), kNoVertex, 0.0);
    if (nodes_[0].config == goal_config_) goal_ = 0;
  }

  /// One sample-steer-connect-rewire iteration.
  void step(const WorldSnapshot& world) {
    const Config sample = sample_uniform(rng_, bounds_);
    const VertexId nearest = index_.nearest(configs_, sample);
    Config fresh = steer(nodes_[nearest].config, sample, params_.delta);
    if (point_in_collision(fresh, world)) return;
    if (!(metric_.distance(fresh, nodes_[nearest].config) > 0.0)) return;
    const std::optional<VertexId> added = insert(fresh, nearest, world);
    if (!added || goal_) return;
    const double r = radius(nodes_.size() + 1);
    if (metric_.distance(nodes_[*added].config, goal_config_) <= r) {
      if (auto g = insert(goal_config_, *added, world)) goal_ = *g;
    }
  }

  RrtStarResult result() const {
    RrtStarResult out;
    out.edge_evaluations = edge_evaluations_;
    out.tree_size = nodes_.size();
    if (!goal_) return out;
    out.cost = nodes_[*goal_].cost;
    std::vector<Config> path;
    for (VertexId v = *goal_; v != kNoVertex; v = nodes_[v].parent) path.push_back(nodes_[v].config);
    std::reverse(path.begin(), path.end());
    out.path = std::move(path);
    return out;
  }

  std::size_t size() const noexcept { return nodes_.size(); }
  const Config& config(VertexId v) const { return nodes_.at(v).config; }
  VertexId parent(VertexId v) const { return nodes_.at(v).parent; }
  double cost(VertexId v) const { return nodes_.at(v).cost; }
  std::uint64_t edge_evaluations() const noexcept { return edge_evaluations_; }

 private:
  struct Node {
    Config config;
    VertexId parent;
    double cost;
    std::vector<VertexId> children;
  };

  double radius(std::size_t n) const {
    return shrink_radius(std::max<std::size_t>(n, 2), bounds_.dim(), params_.gamma_s, bounds_.measure());
  }

  VertexId add_node(Config c, VertexId parent, double cost) {
    const auto id = static_cast<VertexId>(nodes_.size());
    configs_.push_back(c);
    nodes_.push_back({std::move(c), parent, cost, {}});
    index_.insert(configs_, id);
    if (parent != kNoVertex) nodes_[parent].children.push_back(id);
    return id;
  }

  std::optional<VertexId> insert(const Config& x, VertexId nearest, const WorldSnapshot& world) {
    const double r = radius(nodes_.size() + 1);
    std::vector<VertexId> near;
    index_.near(configs_, x, r, near);
    if (std::find(near.begin(), near.end(), nearest) == near.end()) near.push_back(nearest);
    std::sort(near.begin(), near.end());

    std::unordered_map<VertexId, bool> free;
    VertexId best = kNoVertex;
    double best_cost = kInfinity;
    for (VertexId n : near) {
      ++edge_evaluations_;
      const bool ok = !edge_in_collision(nodes_[n].config, x, world, params_.resolution);
      free[n] = ok;
      if (!ok) continue;
      const double c = nodes_[n].cost + metric_.distance(nodes_[n].config, x);
      if (c < best_cost) {
        best_cost = c;
        best = n;
      }
    }
    if (best == kNoVertex) return std::nullopt;
    const VertexId v = add_node(x, best, best_cost);

    for (VertexId n : near) {
      if (n == best || !free[n]) continue;
      const double c = nodes_[v].cost + metric_.distance(x, nodes_[n].config);
      if (c < nodes_[n].cost) reparent(n, v);
    }
    return v;
  }

  void reparent(VertexId child, VertexId parent) {
    auto& siblings = nodes_[nodes_[child].parent].children;
    siblings.erase(std::find(siblings.begin(), siblings.end(), child));
    nodes_[child].parent = parent;
    nodes_[parent].children.push_back(child);
    std::vector<VertexId> stack{child};
    while (!stack.empty()) {
      const VertexId x = stack.back();
      stack.pop_back();
      const Node& p = nodes_[nodes_[x].parent];
      nodes_[x].cost = p.cost + metric_.distance(p.config, nodes_[x].config);
      for (VertexId c : nodes_[x].children) stack.push_back(c);
    }
  }

  SpaceBounds bounds_;
  Config goal_config_;
  RrtStarParams params_;
  M metric_;
  std::vector<Node> nodes_;
  std::vector<Config> configs_;
  detail::KdIndex<M> index_;
  Rng rng_;
  std::optional<VertexId> goal_;
  std::uint64_t edge_evaluations_ = 0;
};

struct RrtStarRequest {
  SpaceBounds bounds;
  Config start;
  Config goal;
  RrtStarParams params;
  std::size_t sample_budget = 1;
  std::uint64_t seed = 0;
};

/// Plans from scratch against the world at time t.
inline RrtStarResult rrt_star_plan(const WorldTimeline& timeline, double t, const RrtStarRequest& req) {
  if (req.sample_budget < 1) throw ContractViolation("sample budget must be >= 1");
  const WorldSnapshot world = timeline.at(t);
  RrtStar<> planner(req.bounds, req.start, req.goal, req.params, req.seed);
  for (std::size_t i = 0; i < req.sample_budget; ++i) planner.step(world);
  return planner.result();
}

}  // namespace llpt
