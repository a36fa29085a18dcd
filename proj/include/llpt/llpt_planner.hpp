#pragma once

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "llpt/lazy_graph.hpp"
#include "llpt/rewire_queue.hpp"
#include "llpt/state_space.hpp"
#include "llpt/world.hpp"

namespace llpt {

/// Ordered vertex list from the robot's vertex to the goal vertex.
using Path = std::vector<VertexId>;

/// Passing this as `alpha` evaluates every unevaluated edge of a candidate path.
inline constexpr std::size_t kAlphaUnbounded = std::numeric_limits<std::size_t>::max();

struct PlannerParams {
  std::size_t alpha = 100;   // lazy evaluations per inner-loop iteration
  double delta = 0.1;        // steering distance
  double gamma_s = 1.0;      // connection-radius scale
  double resolution = 0.01;  // collision-check step as a fraction of the space's max extent

  void validate() const {
    if (alpha < 1) throw ContractViolation("alpha must be >= 1");
    if (!(delta > 0.0)) throw ContractViolation("delta must be > 0");
    if (!(gamma_s > 0.0)) throw ContractViolation("gamma_s must be > 0");
    if (!(resolution > 0.0) || resolution > 1.0) throw ContractViolation("resolution must lie in (0, 1]");
  }
};

/// Per-vertex search state of the goal-rooted tree.
struct NodeRecord {
  double g = kInfinity;    // cost-to-goal at the last expansion
  double lmc = kInfinity;  // one-step lookahead cost-to-goal
  VertexId parent = kNoVertex;
  std::vector<VertexId> children;
};

struct PlannerCounters {
  std::uint64_t edge_evaluations = 0;
  std::uint64_t vertex_expansions = 0;  // non-stale pops
  std::uint64_t stale_pops = 0;
  std::uint64_t search_calls = 0;
  std::uint64_t extensions_attempted = 0;
  std::uint64_t vertices_added = 0;
};

/// Work allowed in one replanning cycle. Zero means "no limit" for expansions.
struct CycleBudget {
  std::size_t max_extensions = 0;
  std::size_t max_expansions = 0;
  std::optional<double> wallclock_seconds;
};

struct CycleResult {
  std::optional<Path> path;  // verified path, when one is available
  double cost = kInfinity;
  bool incomplete = false;   // budget ran out before the inner loop settled
  bool no_solution = false;  // the last inner loop proved no path exists in the graph
  std::vector<double> iteration_costs;  // verified cost after each settled inner loop
  std::size_t collisions_found = 0;
  PlannerCounters counters;  // cumulative, taken at the end of the cycle
};

struct AdvanceResult {
  bool moved = false;
  bool reached_goal = false;
  double traveled_cost = 0.0;
};

/// Instrumentation record emitted by compute_shortest_path when tracing is on.
struct SearchEvent {
  enum class Kind { kStalePop, kExpand, kLmcChange };
  Kind kind;
  VertexId vertex;
  Key key;            // popped key (pops) or fresh key (lmc changes)
  double lmc_before;  // lmc/g right before the event
  double g_before;
  double lmc_after;
};

/// One lazy evaluation, with the candidate path it was taken from.
struct EvaluationAuditEntry {
  EdgeId edge;
  std::size_t candidate;  // index into the audit's candidate list
};

struct EvaluationAudit {
  std::vector<Path> candidates;  // every path returned by compute_shortest_path
  std::vector<EvaluationAuditEntry> evaluations;
};

struct InnerLoopReport {
  enum class Outcome { kVerified, kNoSolution, kIncomplete };
  Outcome outcome;
  const std::optional<Path>* path;
  const WorldSnapshot* world;
};

/// Lazy lifelong planner over a goal-rooted shortest-path tree.
///
/// The tree is repaired by a keyed rewiring cascade whenever edge weights
/// change, and collision checks are deferred to edges of candidate paths.
/// Edge weights and the heuristic come from the metric `M`.
template <Metric M = EuclideanMetric>
class LlptPlanner {
 public:
  LlptPlanner(SpaceBounds bounds, const Config& start, const Config& goal, PlannerParams params,
              std::uint64_t seed, M metric = M{})
      : bounds_(std::move(bounds)), params_(params), metric_(metric), graph_(bounds_.dim(), metric), rng_(seed) {
    params_.validate();
    require_same_dim(start, bounds_.lower());
    require_same_dim(goal, bounds_.lower());
    goal_ = graph_.add_vertex(goal);
    records_.emplace_back();
    records_[goal_].g = records_[goal_].lmc = 0.0;
    if (start == goal) {
      start_ = goal_;
    } else {
      start_ = graph_.add_vertex(start);
      records_.emplace_back();
    }
  }

  /// Adopts an existing graph. Every edge is announced through update_node, the
  /// same way freshly connected edges are.
  LlptPlanner(LazyGraph<M> graph, VertexId start, VertexId goal, SpaceBounds bounds, PlannerParams params,
              std::uint64_t seed)
      : bounds_(std::move(bounds)), params_(params), metric_(graph.metric()), graph_(std::move(graph)), rng_(seed) {
    params_.validate();
    if (start >= graph_.vertex_count() || goal >= graph_.vertex_count()) {
      throw ContractViolation("start/goal must be graph vertices");
    }
    start_ = start;
    goal_ = goal;
    records_.resize(graph_.vertex_count());
    records_[goal_].g = records_[goal_].lmc = 0.0;
    for (const EdgeRecord& e : graph_.edges()) {
      update_node(e.u, e.v);
      update_node(e.v, e.u);
    }
  }

  const LazyGraph<M>& graph() const noexcept { return graph_; }
  const SpaceBounds& bounds() const noexcept { return bounds_; }
  const PlannerParams& params() const noexcept { return params_; }
  void set_alpha(std::size_t alpha) {
    if (alpha < 1) throw ContractViolation("alpha must be >= 1");
    params_.alpha = alpha;
  }
  const NodeRecord& record(VertexId v) const { return records_.at(v); }
  const RewireQueue& queue() const noexcept { return queue_; }
  VertexId start() const noexcept { return start_; }
  VertexId goal() const noexcept { return goal_; }
  double k_m() const noexcept { return k_m_; }
  const PlannerCounters& counters() const noexcept { return counters_; }
  const std::optional<Path>& current_path() const noexcept { return current_path_; }

  bool in_tree(VertexId v) const { return v == goal_ || records_[v].parent != kNoVertex; }

  Key calculate_key(VertexId v) const {
    const NodeRecord& r = records_.at(v);
    const double m = std::min(r.lmc, r.g);
    return {m + metric_.heuristic(graph_.coords(start_), graph_.coords(v)) + k_m_, m};
  }

  /// Adopts u as v's parent when that lowers lmc(v), and queues v.
  void update_node(VertexId v, VertexId u) {
    const auto e = graph_.find_edge(v, u);
    if (!e) throw ContractViolation("update_node requires an existing edge");
    const double candidate = lazy_weight(graph_.edge(*e)) + records_[u].lmc;
    if (records_[v].lmc > candidate) {
      make_parent_of(v, u);
      records_[v].lmc = candidate;
      queue_.update(v, calculate_key(v));
    }
  }

  /// Detaches v and its whole subtree, sets their lmc to infinity, and queues them.
  void propagate_cost_to_leave(VertexId v) {
    std::vector<VertexId> stack{v};
    while (!stack.empty()) {
      const VertexId x = stack.back();
      stack.pop_back();
      remove_from_tree(x);
      NodeRecord& rx = records_[x];
      rx.g = std::min(rx.g, rx.lmc);
      rx.lmc = kInfinity;
      queue_.update(x, calculate_key(x));
      for (VertexId c : rx.children) {
        records_[c].parent = kNoVertex;
        stack.push_back(c);
      }
      rx.children.clear();
    }
  }

  /// Runs the rewiring cascade until the robot's vertex is consistent and no
  /// queued vertex is more promising. Returns the tree path to the goal, if any.
  std::optional<Path> compute_shortest_path() {
    ++counters_.search_calls;
    while (!queue_.empty() && start_needs_work()) {
      const Key k_old = queue_.top_key();
      const VertexId v = queue_.pop().first;
      const Key k_new = calculate_key(v);
      NodeRecord& rv = records_[v];
      if (key_less(k_old, k_new)) {
        queue_.update(v, k_new);
        ++counters_.stale_pops;
        trace(SearchEvent::Kind::kStalePop, v, k_old, rv.lmc, rv.g, rv.lmc);
        continue;
      }
      ++counters_.vertex_expansions;
      trace(SearchEvent::Kind::kExpand, v, k_old, rv.lmc, rv.g, rv.lmc);

      if (rv.lmc > rv.g || (rv.lmc == kInfinity && rv.g == kInfinity)) {
        for (const Neighbor& n : graph_.neighbors(v)) {
          if (!in_tree(n.vertex)) continue;
          const double candidate = lazy_weight(graph_.edge(n.edge)) + records_[n.vertex].lmc;
          if (rv.lmc > candidate) {
            const double before = rv.lmc;
            make_parent_of(v, n.vertex);
            rv.lmc = candidate;
            trace(SearchEvent::Kind::kLmcChange, v, calculate_key(v), before, rv.g, rv.lmc);
          }
        }
      }

      if (rv.lmc != kInfinity) {
        for (const Neighbor& n : graph_.neighbors(v)) {
          const VertexId u = n.vertex;
          if (u == rv.parent) continue;
          NodeRecord& ru = records_[u];
          const double candidate = lazy_weight(graph_.edge(n.edge)) + rv.lmc;
          if (ru.lmc > candidate) {
            const double before = ru.lmc;
            make_parent_of(u, v);
            ru.lmc = candidate;
            const Key ku = calculate_key(u);
            queue_.update(u, ku);
            trace(SearchEvent::Kind::kLmcChange, u, ku, before, ru.g, ru.lmc);
          }
        }
      }
      rv.g = rv.lmc;
    }
    auto path = tree_path();
    if (audit_ && path) audit_->candidates.push_back(*path);
    return path;
  }

  /// Collision-checks up to alpha unevaluated edges of `path`, preferring those
  /// nearest the goal. Returns the child endpoint of every colliding edge.
  std::vector<VertexId> evaluate_edge(const Path& path, const WorldSnapshot& world) {
    struct Pending {
      std::size_t index;
      EdgeId edge;
    };
    std::vector<Pending> pending;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      const auto e = graph_.find_edge(path[i], path[i + 1]);
      if (!e) throw ContractViolation("evaluate_edge: path uses a missing edge");
      if (graph_.edge(*e).state == EdgeState::kUnevaluated) pending.push_back({i, *e});
    }
    std::size_t first = 0;
    if (pending.size() > params_.alpha) first = pending.size() - params_.alpha;

    std::vector<VertexId> collided;
    for (std::size_t k = pending.size(); k-- > first;) {
      const auto [index, edge] = pending[k];
      const EvaluationResult r = graph_.evaluate(edge, world, params_.resolution);
      ++counters_.edge_evaluations;
      if (audit_) audit_->evaluations.push_back({edge, audit_->candidates.empty() ? 0 : audit_->candidates.size() - 1});
      if (r.state == EdgeState::kEvaluatedCollided) collided.push_back(path[index]);
    }
    return collided;
  }

  /// Samples, steers toward the sample, and connects the new vertex lazily within
  /// the shrinking radius. Returns false when the steered point is rejected.
  bool extend_search_graph(const WorldSnapshot& world) {
    ++counters_.extensions_attempted;
    const Config sample = sample_uniform(rng_, bounds_);
    const VertexId nearest = graph_.nearest(sample);
    Config fresh = steer(graph_.coords(nearest), sample, params_.delta);
    if (point_in_collision(fresh, world)) return false;
    if (!(metric_.distance(fresh, graph_.coords(nearest)) > 0.0)) return false;
    const VertexId v = graph_.add_vertex(std::move(fresh));
    records_.emplace_back();
    ++counters_.vertices_added;
    const double r = shrink_radius(graph_.vertex_count(), bounds_.dim(), params_.gamma_s, bounds_.measure());
    for (EdgeId e : graph_.connect_radius(v, r)) update_node(v, graph_.edge(e).other(v));
    return true;
  }

  /// Clears last cycle's evaluations and announces every edge whose lazy weight
  /// dropped. Returns the number of such edges.
  std::size_t begin_cycle() {
    const std::vector<EdgeId> modified = graph_.reset_evaluations();
    for (EdgeId id : modified) {
      const EdgeRecord& e = graph_.edge(id);
      update_node(e.u, e.v);
      update_node(e.v, e.u);
    }
    return modified.size();
  }

  /// One replanning cycle against the world at time t.
  CycleResult replan_cycle(const WorldTimeline& timeline, double t, const CycleBudget& budget) {
    const WorldSnapshot world = timeline.at(t);
    return replan_cycle(world, budget);
  }

  CycleResult replan_cycle(const WorldSnapshot& world, const CycleBudget& budget) {
    using Clock = std::chrono::steady_clock;
    const auto started = Clock::now();
    const std::uint64_t expansions_at_start = counters_.vertex_expansions;
    auto exhausted = [&] {
      if (budget.max_expansions > 0 && counters_.vertex_expansions - expansions_at_start >= budget.max_expansions) {
        return true;
      }
      if (budget.wallclock_seconds) {
        const std::chrono::duration<double> elapsed = Clock::now() - started;
        if (elapsed.count() >= *budget.wallclock_seconds) return true;
      }
      return false;
    };

    const std::optional<Path> previous = current_path_;
    begin_cycle();

    CycleResult result;
    std::optional<Path> verified_this_cycle;
    InnerLoopReport::Outcome outcome = run_inner_loop(world, exhausted, result, verified_this_cycle);
    std::size_t extensions = 0;
    while (outcome != InnerLoopReport::Outcome::kIncomplete && extensions < budget.max_extensions && !exhausted()) {
      extend_search_graph(world);
      ++extensions;
      outcome = run_inner_loop(world, exhausted, result, verified_this_cycle);
    }

    result.no_solution = outcome == InnerLoopReport::Outcome::kNoSolution;
    result.incomplete = outcome == InnerLoopReport::Outcome::kIncomplete;
    if (outcome == InnerLoopReport::Outcome::kNoSolution) {
      current_path_.reset();
    } else if (outcome == InnerLoopReport::Outcome::kIncomplete) {
      // Keep the newest path whose edges were all confirmed free this cycle.
      current_path_.reset();
      const std::optional<Path>* candidates[] = {&verified_this_cycle, &previous};
      for (const auto* candidate : candidates) {
        if (*candidate && (*candidate)->front() == start_ && fully_free(**candidate)) {
          current_path_ = *candidate;
          break;
        }
      }
    } else {
      current_path_ = verified_this_cycle;
    }
    result.path = current_path_;
    result.cost = current_path_ ? path_cost(*current_path_) : kInfinity;
    result.counters = counters_;
    return result;
  }

  /// Moves the robot's vertex forward along `path` by speed * dt of travel,
  /// snapping to vertices; partial edge progress carries to the next call.
  AdvanceResult advance_robot(const Path& path, double speed, double dt) {
    if (path.empty() || path.front() != start_) throw ContractViolation("advance_robot: path must begin at start");
    if (!(speed >= 0.0) || !(dt >= 0.0)) throw ContractViolation("advance_robot: speed and dt must be >= 0");
    AdvanceResult out;
    if (start_ == goal_) {
      out.reached_goal = true;
      return out;
    }
    travel_ += speed * dt;
    std::size_t i = 0;
    while (i + 1 < path.size()) {
      const auto e = graph_.find_edge(path[i], path[i + 1]);
      if (!e) throw ContractViolation("advance_robot: path uses a missing edge");
      const double len = graph_.edge(*e).what_if_free;
      if (len > travel_) break;
      travel_ -= len;
      out.traveled_cost += len;
      ++i;
    }
    if (i > 0) {
      start_ = path[i];
      k_m_ += out.traveled_cost;
      out.moved = true;
      if (current_path_ && current_path_->front() == path.front()) {
        current_path_ = Path(path.begin() + static_cast<std::ptrdiff_t>(i), path.end());
      }
    }
    if (start_ == goal_) {
      out.reached_goal = true;
      travel_ = 0.0;
    }
    return out;
  }

  /// Sum of lazy weights along a path.
  double path_cost(const Path& path) const {
    double c = 0.0;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) c += graph_.lazy_weight(path[i], path[i + 1]);
    return c;
  }

  bool fully_free(const Path& path) const {
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      const auto e = graph_.find_edge(path[i], path[i + 1]);
      if (!e || graph_.edge(*e).state != EdgeState::kEvaluatedFree) return false;
    }
    return true;
  }

  /// Structural checks on the tree; returns a description of the first problem found.
  std::optional<std::string> check_tree_integrity() const {
    const NodeRecord& rg = records_[goal_];
    if (rg.lmc != 0.0 || rg.g != 0.0 || rg.parent != kNoVertex) return "goal record altered";
    for (VertexId v = 0; v < records_.size(); ++v) {
      const NodeRecord& r = records_[v];
      if (r.parent != kNoVertex) {
        const auto& siblings = records_[r.parent].children;
        if (std::count(siblings.begin(), siblings.end(), v) != 1) {
          return "vertex " + std::to_string(v) + " missing from its parent's children";
        }
        if (!graph_.find_edge(v, r.parent)) return "tree edge without graph edge at " + std::to_string(v);
      }
      for (VertexId c : r.children) {
        if (records_[c].parent != v) return "child " + std::to_string(c) + " disowns " + std::to_string(v);
      }
      VertexId cur = v;
      std::size_t steps = 0;
      while (records_[cur].parent != kNoVertex) {
        cur = records_[cur].parent;
        if (++steps > records_.size()) return "parent cycle through " + std::to_string(v);
      }
      if (r.parent != kNoVertex && cur != goal_) return "tree branch not rooted at goal: " + std::to_string(v);
    }
    return std::nullopt;
  }

  /// Instrumentation hooks. Pointers are borrowed; pass nullptr to disable.
  void set_search_trace(std::vector<SearchEvent>* trace) noexcept { trace_ = trace; }
  void set_evaluation_audit(EvaluationAudit* audit) noexcept { audit_ = audit; }
  void set_inner_loop_observer(std::function<void(const InnerLoopReport&)> observer) {
    observer_ = std::move(observer);
  }

 private:
  bool start_needs_work() const {
    const NodeRecord& s = records_[start_];
    if (s.lmc > s.g || (s.lmc == kInfinity && s.g == kInfinity)) return true;
    if (queue_.contains(start_)) return true;
    return key_less(queue_.top_key(), calculate_key(start_));
  }

  std::optional<Path> tree_path() const {
    if (records_[start_].lmc == kInfinity) return std::nullopt;
    Path path{start_};
    VertexId cur = start_;
    while (cur != goal_) {
      cur = records_[cur].parent;
      if (cur == kNoVertex || path.size() > records_.size()) {
        throw std::logic_error("search tree is not rooted at the goal");
      }
      path.push_back(cur);
    }
    return path;
  }

  void make_parent_of(VertexId child, VertexId parent) {
    remove_from_tree(child);
    records_[child].parent = parent;
    records_[parent].children.push_back(child);
  }

  void remove_from_tree(VertexId v) {
    NodeRecord& r = records_[v];
    if (r.parent == kNoVertex) return;
    auto& siblings = records_[r.parent].children;
    const auto it = std::find(siblings.begin(), siblings.end(), v);
    if (it != siblings.end()) {
      *it = siblings.back();
      siblings.pop_back();
    }
    r.parent = kNoVertex;
  }

  template <class Exhausted>
  InnerLoopReport::Outcome run_inner_loop(const WorldSnapshot& world, Exhausted& exhausted, CycleResult& result,
                                          std::optional<Path>& verified) {
    std::optional<Path> path;
    auto report = [&](InnerLoopReport::Outcome o) {
      if (observer_) observer_(InnerLoopReport{o, &path, &world});
      return o;
    };
    while (true) {
      if (exhausted()) return report(InnerLoopReport::Outcome::kIncomplete);
      path = compute_shortest_path();
      if (!path) return report(InnerLoopReport::Outcome::kNoSolution);
      const std::vector<VertexId> collided = evaluate_edge(*path, world);
      result.collisions_found += collided.size();
      for (VertexId v : collided) propagate_cost_to_leave(v);
      if (collided.empty() && fully_free(*path)) {
        verified = path;
        result.iteration_costs.push_back(path_cost(*path));
        return report(InnerLoopReport::Outcome::kVerified);
      }
    }
  }

  void trace(SearchEvent::Kind kind, VertexId v, const Key& key, double lmc_before, double g_before,
             double lmc_after) {
    if (trace_) trace_->push_back({kind, v, key, lmc_before, g_before, lmc_after});
  }

  SpaceBounds bounds_;
  PlannerParams params_;
  M metric_;
  LazyGraph<M> graph_;
  Rng rng_;
  std::vector<NodeRecord> records_;
  RewireQueue queue_;
  VertexId start_ = kNoVertex;
  VertexId goal_ = kNoVertex;
  double k_m_ = 0.0;
  double travel_ = 0.0;
  PlannerCounters counters_;
  std::optional<Path> current_path_;

  std::vector<SearchEvent>* trace_ = nullptr;
  EvaluationAudit* audit_ = nullptr;
  std::function<void(const InnerLoopReport&)> observer_;
};

}  // namespace llpt
