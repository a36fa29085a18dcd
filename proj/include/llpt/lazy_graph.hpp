#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "llpt/state_space.hpp"
#include "llpt/world.hpp"

namespace llpt {

using VertexId = std::uint32_t;
using EdgeId = std::uint32_t;

inline constexpr VertexId kNoVertex = std::numeric_limits<VertexId>::max();

enum class EdgeState : std::uint8_t { kUnevaluated, kEvaluatedFree, kEvaluatedCollided };

/// One undirected edge shared by both directed views (u, v) and (v, u).
struct EdgeRecord {
  VertexId u = kNoVertex;
  VertexId v = kNoVertex;
  double what_if_free = 0.0;  // cost if the local trajectory is collision-free
  EdgeState state = EdgeState::kUnevaluated;

  VertexId other(VertexId x) const noexcept { return x == u ? v : u; }
};

/// Lazy weight: the what-if-free cost unless the edge is known to collide.
inline double lazy_weight(const EdgeRecord& e) noexcept {
  return e.state == EdgeState::kEvaluatedCollided ? kInfinity : e.what_if_free;
}

struct Neighbor {
  VertexId vertex;
  EdgeId edge;
};

struct EvaluationResult {
  EdgeState state;
  bool weight_changed;
};

/// Connection radius of the r-disk random geometric graph.
///
/// r = gamma_s * 2 * (1 + 1/d)^(1/d) * (mu / zeta_d)^(1/d) * (ln N / N)^(1/d)
inline double shrink_radius(std::size_t n, std::size_t d, double gamma_s, double mu_free) {
  if (n < 2) throw ContractViolation("shrink_radius requires N >= 2");
  if (d < 1) throw ContractViolation("shrink_radius requires d >= 1");
  if (!(gamma_s > 0.0) || !(mu_free > 0.0)) throw ContractViolation("shrink_radius requires gamma_s, mu > 0");
  const double dd = static_cast<double>(d);
  const double nn = static_cast<double>(n);
  const double inv_d = 1.0 / dd;
  return gamma_s * 2.0 * std::pow(1.0 + inv_d, inv_d) * std::pow(mu_free / unit_ball_volume(d), inv_d) *
         std::pow(std::log(nn) / nn, inv_d);
}

namespace detail {

// Incremental kd-tree over vertex ids. Exact queries only.
template <Metric M>
class KdIndex {
 public:
  explicit KdIndex(M metric) : metric_(std::move(metric)) {}

  void insert(const std::vector<Config>& coords, VertexId id) {
    const Config& p = coords[id];
    nodes_.push_back({id, -1, -1});
    const int fresh = static_cast<int>(nodes_.size()) - 1;
    if (fresh == 0) return;
    int cur = 0;
    std::size_t depth = 0;
    while (true) {
      const std::size_t axis = depth % p.dim();
      const bool left = p[axis] < coords[nodes_[cur].id][axis];
      int& next = left ? nodes_[cur].left : nodes_[cur].right;
      if (next < 0) {
        next = fresh;
        return;
      }
      cur = next;
      ++depth;
    }
  }

  /// Nearest vertex; ties go to the smaller id.
  VertexId nearest(const std::vector<Config>& coords, const Config& q) const {
    if (nodes_.empty()) throw ContractViolation("nearest on empty graph");
    Best best{kInfinity, kNoVertex};
    nearest_rec(coords, 0, 0, q, best);
    return best.id;
  }

  /// All vertices with distance <= r, unordered.
  void near(const std::vector<Config>& coords, const Config& q, double r, std::vector<VertexId>& out) const {
    if (!nodes_.empty()) near_rec(coords, 0, 0, q, r, out);
  }

 private:
  struct Node {
    VertexId id;
    int left;
    int right;
  };
  struct Best {
    double dist;
    VertexId id;
  };

  void nearest_rec(const std::vector<Config>& coords, int idx, std::size_t depth, const Config& q, Best& best) const {
    if (idx < 0) return;
    const Node& n = nodes_[idx];
    const Config& p = coords[n.id];
    const double d = metric_.distance(q, p);
    if (d < best.dist || (d == best.dist && n.id < best.id)) best = {d, n.id};
    const std::size_t axis = depth % q.dim();
    const double diff = q[axis] - p[axis];
    const int first = diff < 0.0 ? n.left : n.right;
    const int second = diff < 0.0 ? n.right : n.left;
    nearest_rec(coords, first, depth + 1, q, best);
    if (std::abs(diff) <= best.dist) nearest_rec(coords, second, depth + 1, q, best);
  }

  void near_rec(const std::vector<Config>& coords, int idx, std::size_t depth, const Config& q, double r, std::vector<VertexId>& out) const {
    if (idx < 0) return;
    const Node& n = nodes_[idx];
    const Config& p = coords[n.id];
    if (metric_.distance(q, p) <= r) out.push_back(n.id);
    const std::size_t axis = depth % q.dim();
    const double diff = q[axis] - p[axis];
    // Left subtree holds coordinates < p[axis], right holds >= p[axis].
    if (diff < 0.0 || std::abs(diff) <= r) near_rec(coords, n.left, depth + 1, q, r, out);
    if (diff >= 0.0 || std::abs(diff) <= r) near_rec(coords, n.right, depth + 1, q, r, out);
  }

  M metric_;
  std::vector<Node> nodes_;
};

}  // namespace detail

/// Search graph with lazily evaluated edges and an exact spatial index.
///
/// Edges are undirected records with two directed views. Each record carries an
/// evaluation state that is valid for the current replanning cycle only;
/// reset_evaluations() returns every edge to kUnevaluated.
template <Metric M = EuclideanMetric>
class LazyGraph {
 public:
  explicit LazyGraph(std::size_t dim, M metric = M{})
      : dim_(dim), metric_(metric), index_(metric) {
    if (dim == 0) throw ContractViolation("graph dimension must be >= 1");
  }

  std::size_t dim() const noexcept { return dim_; }
  std::size_t vertex_count() const noexcept { return coords_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  const M& metric() const noexcept { return metric_; }

  const Config& coords(VertexId v) const { return coords_.at(v); }
  std::span<const Neighbor> neighbors(VertexId v) const { return adjacency_.at(v); }
  const EdgeRecord& edge(EdgeId e) const { return edges_.at(e); }
  std::span<const EdgeRecord> edges() const noexcept { return edges_; }

  VertexId add_vertex(Config c) {
    if (c.dim() != dim_) throw ContractViolation("vertex dimension mismatch");
    if (!c.all_finite()) throw ContractViolation("vertex coordinates must be finite");
    const auto id = static_cast<VertexId>(coords_.size());
    coords_.push_back(std::move(c));
    adjacency_.emplace_back();
    index_.insert(coords_, id);
    return id;
  }

  std::optional<EdgeId> find_edge(VertexId a, VertexId b) const {
    for (const Neighbor& n : adjacency_.at(a)) {
      if (n.vertex == b) return n.edge;
    }
    return std::nullopt;
  }

  /// Inserts an unevaluated edge between a and b unless one exists or they coincide.
  std::optional<EdgeId> add_edge(VertexId a, VertexId b) {
    if (a == b || a >= vertex_count() || b >= vertex_count()) throw ContractViolation("invalid edge endpoints");
    if (find_edge(a, b)) return std::nullopt;
    const double w = metric_.distance(coords_[a], coords_[b]);
    if (!(w > 0.0)) return std::nullopt;
    const auto id = static_cast<EdgeId>(edges_.size());
    edges_.push_back({a, b, w, EdgeState::kUnevaluated});
    adjacency_[a].push_back({b, id});
    adjacency_[b].push_back({a, id});
    return id;
  }

  /// Connects v to every vertex within distance r (inclusive) that it is not yet
  /// joined to. Coincident vertices are skipped so every edge has positive length.
  std::vector<EdgeId> connect_radius(VertexId v, double r) {
    if (v >= vertex_count()) throw ContractViolation("connect_radius on unknown vertex");
    std::vector<VertexId> candidates = near(coords_[v], r);
    std::vector<EdgeId> created;
    for (VertexId u : candidates) {
      if (u == v) continue;
      if (auto e = add_edge(v, u)) created.push_back(*e);
    }
    return created;
  }

  VertexId nearest(const Config& c) const {
    if (c.dim() != dim_) throw ContractViolation("query dimension mismatch");
    return index_.nearest(coords_, c);
  }

  /// Vertices within distance r of c, sorted by id.
  std::vector<VertexId> near(const Config& c, double r) const {
    if (c.dim() != dim_) throw ContractViolation("query dimension mismatch");
    std::vector<VertexId> out;
    index_.near(coords_, c, r, out);
    std::sort(out.begin(), out.end());
    return out;
  }

  /// Lazy weight of the directed edge (a, b); +inf when no such edge exists.
  double lazy_weight(VertexId a, VertexId b) const {
    const auto e = find_edge(a, b);
    return e ? llpt::lazy_weight(edges_[*e]) : kInfinity;
  }

  /// Collision-checks an unevaluated edge against the cycle's snapshot. Already
  /// evaluated edges keep their state for the rest of the cycle.
  EvaluationResult evaluate(EdgeId id, const WorldSnapshot& world, double resolution) {
    EdgeRecord& e = edges_.at(id);
    if (e.state != EdgeState::kUnevaluated) return {e.state, false};
    const double before = llpt::lazy_weight(e);
    const bool hit = edge_in_collision(coords_[e.u], coords_[e.v], world, resolution);
    e.state = hit ? EdgeState::kEvaluatedCollided : EdgeState::kEvaluatedFree;
    evaluated_.push_back(id);
    return {e.state, llpt::lazy_weight(e) != before};
  }

  /// Starts a new cycle: clears all evaluation state and returns the edges whose
  /// lazy weight changed (exactly those that were known to collide).
  std::vector<EdgeId> reset_evaluations() {
    std::vector<EdgeId> modified;
    for (EdgeId id : evaluated_) {
      EdgeRecord& e = edges_[id];
      if (e.state == EdgeState::kEvaluatedCollided) modified.push_back(id);
      e.state = EdgeState::kUnevaluated;
    }
    evaluated_.clear();
    return modified;
  }

  /// Edges evaluated since the last reset, in evaluation order.
  std::span<const EdgeId> evaluated_edges() const noexcept { return evaluated_; }

 private:
  std::size_t dim_;
  M metric_;
  std::vector<Config> coords_;
  std::vector<std::vector<Neighbor>> adjacency_;
  std::vector<EdgeRecord> edges_;
  std::vector<EdgeId> evaluated_;
  detail::KdIndex<M> index_;
};

}  // namespace llpt
