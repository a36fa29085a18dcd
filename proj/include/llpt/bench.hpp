#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "llpt/llpt_planner.hpp"
#include "llpt/rrt_star.hpp"
#include "llpt/scenario.hpp"

namespace llpt {

enum class PlannerKind { kLlpt, kRrtStar };
enum class BudgetMode { kDeterministic, kWallclock };

inline std::string planner_name(PlannerKind p) { return p == PlannerKind::kLlpt ? "llpt" : "rrt_star"; }

inline PlannerKind parse_planner(const std::string& s) {
  if (s == "llpt") return PlannerKind::kLlpt;
  if (s == "rrt_star" || s == "rrtstar") return PlannerKind::kRrtStar;
  throw std::invalid_argument("unknown planner '" + s + "' (expected llpt or rrt_star)");
}

inline BudgetMode parse_budget_mode(const std::string& s) {
  if (s == "deterministic") return BudgetMode::kDeterministic;
  if (s == "wallclock") return BudgetMode::kWallclock;
  throw std::invalid_argument("unknown budget mode '" + s + "'");
}

/// One replanning cycle. Counters are cumulative over the trial.
struct CycleMetrics {
  double verified_cost = kInfinity;
  std::uint64_t edge_evaluations = 0;
  std::uint64_t vertex_expansions = 0;
  std::size_t graph_size = 0;
  double elapsed = 0.0;  // seconds, wall clock; never written to reports
};

struct TrialMetrics {
  bool success = false;
  double cost = kInfinity;  // failure cost sentinel when !success
  std::uint64_t seed = 0;
  bool collided = false;    // dynamic mode: robot swept through an obstacle
  std::vector<CycleMetrics> cycles;

  std::uint64_t edge_evaluations() const { return cycles.empty() ? 0 : cycles.back().edge_evaluations; }
  std::uint64_t vertex_expansions() const { return cycles.empty() ? 0 : cycles.back().vertex_expansions; }
  std::size_t graph_size() const { return cycles.empty() ? 0 : cycles.back().graph_size; }
};

/// Hook called after every LLPT* cycle with the planner and the world that cycle ran against.
using LlptCycleObserver =
    std::function<void(const LlptPlanner<>&, const WorldSnapshot&, const CycleResult&, std::size_t cycle)>;

struct TrialOptions {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> alpha;
  BudgetMode budget_mode = BudgetMode::kDeterministic;
  LlptCycleObserver on_llpt_cycle;
};

namespace detail {

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t k) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (k + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline CycleBudget llpt_budget(const Scenario& s, BudgetMode mode) {
  CycleBudget b;
  b.max_expansions = s.budget.expansions_per_cycle;
  if (mode == BudgetMode::kWallclock) {
    b.max_extensions = std::numeric_limits<std::size_t>::max();
    b.wallclock_seconds = s.budget.wallclock_per_cycle;
  } else {
    b.max_extensions = s.budget.extensions_per_cycle;
  }
  return b;
}

inline TrialMetrics run_llpt(const Scenario& s, const TrialOptions& opt, std::uint64_t seed) {
  PlannerParams params = s.planner;
  if (opt.alpha) params.alpha = *opt.alpha;
  LlptPlanner<> planner(s.bounds, s.start, s.goal, params, seed);
  const WorldTimeline timeline = s.timeline();
  const CycleBudget budget = llpt_budget(s, opt.budget_mode);
  TrialMetrics m;
  m.seed = seed;
  double traveled = 0.0;
  bool reached = planner.start() == planner.goal();

  for (std::size_t k = 0; k < s.budget.max_cycles && !reached; ++k) {
    const double t = s.mode == ScenarioMode::kDynamic ? static_cast<double>(k) * s.robot.cycle_period : 0.0;
    const WorldSnapshot world = timeline.at(t);
    const auto t0 = std::chrono::steady_clock::now();
    const CycleResult r = planner.replan_cycle(world, budget);
    CycleMetrics c;
    c.verified_cost = r.cost;
    c.edge_evaluations = r.counters.edge_evaluations;
    c.vertex_expansions = r.counters.vertex_expansions;
    c.graph_size = planner.graph().vertex_count();
    c.elapsed = seconds_since(t0);
    m.cycles.push_back(c);
    if (opt.on_llpt_cycle) opt.on_llpt_cycle(planner, world, r, k);

    if (s.mode == ScenarioMode::kDynamic && r.path) {
      const Path path = *r.path;
      const AdvanceResult a = planner.advance_robot(path, s.robot.speed, s.robot.cycle_period);
      traveled += a.traveled_cost;
      if (a.moved) {
        const WorldSnapshot after = timeline.at(t + s.robot.cycle_period);
        for (std::size_t i = 0; path[i] != planner.start(); ++i) {
          if (edge_in_collision(planner.graph().coords(path[i]), planner.graph().coords(path[i + 1]), after,
                                params.resolution)) {
            m.collided = true;
          }
        }
      }
      reached = a.reached_goal;
      if (m.collided) break;
    }
  }

  if (s.mode == ScenarioMode::kStatic) {
    m.success = !m.cycles.empty() && m.cycles.back().verified_cost < kInfinity;
    m.cost = m.success ? m.cycles.back().verified_cost : s.failure_cost();
  } else {
    m.success = reached && !m.collided;
    m.cost = m.success ? traveled : s.failure_cost();
  }
  return m;
}

inline RrtStarParams rrt_params(const Scenario& s) {
  return RrtStarParams{s.planner.delta, s.planner.gamma_s, s.planner.resolution};
}

/// Steps `planner` for the cycle's budget.
inline void step_rrt(RrtStar<>& planner, const WorldSnapshot& world, const Scenario& s, BudgetMode mode) {
  if (mode == BudgetMode::kWallclock) {
    const auto t0 = std::chrono::steady_clock::now();
    do {
      planner.step(world);
    } while (seconds_since(t0) < s.budget.wallclock_per_cycle);
  } else {
    for (std::size_t i = 0; i < s.budget.extensions_per_cycle; ++i) planner.step(world);
  }
}

inline TrialMetrics run_rrt(const Scenario& s, const TrialOptions& opt, std::uint64_t seed) {
  const WorldTimeline timeline = s.timeline();
  TrialMetrics m;
  m.seed = seed;
  std::uint64_t evals = 0;

  if (s.mode == ScenarioMode::kStatic) {
    const WorldSnapshot world = timeline.at(0.0);
    RrtStar<> planner(s.bounds, s.start, s.goal, rrt_params(s), seed);
    for (std::size_t k = 0; k < s.budget.max_cycles; ++k) {
      const auto t0 = std::chrono::steady_clock::now();
      step_rrt(planner, world, s, opt.budget_mode);
      const RrtStarResult r = planner.result();
      m.cycles.push_back({r.cost, r.edge_evaluations, 0, r.tree_size, seconds_since(t0)});
    }
    m.success = m.cycles.back().verified_cost < kInfinity;
    m.cost = m.success ? m.cycles.back().verified_cost : s.failure_cost();
    return m;
  }

  // Dynamic: replan from scratch each cycle from the robot's configuration.
  Config robot = s.start;
  double traveled = 0.0;
  bool reached = robot == s.goal;
  for (std::size_t k = 0; k < s.budget.max_cycles && !reached; ++k) {
    const double t = static_cast<double>(k) * s.robot.cycle_period;
    const WorldSnapshot world = timeline.at(t);
    const auto t0 = std::chrono::steady_clock::now();
    RrtStar<> planner(s.bounds, robot, s.goal, rrt_params(s), mix_seed(seed, k));
    RrtStarResult r;
    if (!point_in_collision(robot, world)) {
      step_rrt(planner, world, s, opt.budget_mode);
      r = planner.result();
    }
    evals += r.edge_evaluations;
    m.cycles.push_back({r.cost, evals, 0, r.tree_size, seconds_since(t0)});
    if (!r.path) continue;

    const WorldSnapshot after = timeline.at(t + s.robot.cycle_period);
    double budget = s.robot.speed * s.robot.cycle_period;
    const std::vector<Config>& path = *r.path;
    for (std::size_t i = 0; i + 1 < path.size() && budget > 0.0; ++i) {
      const double len = distance(robot, path[i + 1]);
      const Config next = len <= budget ? path[i + 1] : interpolate(robot, path[i + 1], budget / len);
      if (edge_in_collision(robot, next, after, s.planner.resolution)) m.collided = true;
      traveled += std::min(len, budget);
      budget -= len;
      robot = next;
    }
    reached = robot == s.goal;
    if (m.collided) break;
  }
  m.success = reached && !m.collided;
  m.cost = m.success ? traveled : s.failure_cost();
  return m;
}

}  // namespace detail

/// Runs one trial. Static scenarios run max_cycles cycles against the world at
/// t = 0; dynamic scenarios run the navigation loop until the robot reaches
/// the goal or the cycle budget is spent.
inline TrialMetrics run_trial(const Scenario& scenario, PlannerKind planner, const TrialOptions& options = {}) {
  const std::uint64_t seed = options.seed.value_or(scenario.seed);
  return planner == PlannerKind::kLlpt ? detail::run_llpt(scenario, options, seed)
                                       : detail::run_rrt(scenario, options, seed);
}

struct SuiteRow {
  std::string scenario_id;
  std::string planner;
  std::size_t seeds = 0;
  double success_rate = 0.0;
  double mean_cost = 0.0;
  double std_cost = 0.0;
  double mean_edge_evals = 0.0;
  double mean_expansions = 0.0;
  double mean_graph_size = 0.0;
};

struct Series {
  std::string name;
  std::vector<std::pair<double, double>> points;
};

struct ReportTable {
  std::vector<SuiteRow> rows;
  std::vector<Series> series;
};

inline double mean_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

/// Sample standard deviation; zero for fewer than two values.
inline double std_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double mu = mean_of(v);
  double acc = 0.0;
  for (double x : v) acc += (x - mu) * (x - mu);
  return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

inline double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline SuiteRow aggregate(const std::string& scenario_id, const std::string& planner,
                          const std::vector<TrialMetrics>& trials) {
  SuiteRow row{scenario_id, planner, trials.size()};
  std::vector<double> cost, evals, exps, size;
  std::size_t ok = 0;
  for (const auto& t : trials) {
    ok += t.success ? 1 : 0;
    cost.push_back(t.cost);
    evals.push_back(static_cast<double>(t.edge_evaluations()));
    exps.push_back(static_cast<double>(t.vertex_expansions()));
    size.push_back(static_cast<double>(t.graph_size()));
  }
  row.success_rate = trials.empty() ? 0.0 : static_cast<double>(ok) / static_cast<double>(trials.size());
  row.mean_cost = mean_of(cost);
  row.std_cost = std_of(cost);
  row.mean_edge_evals = mean_of(evals);
  row.mean_expansions = mean_of(exps);
  row.mean_graph_size = mean_of(size);
  return row;
}

/// Runs `count` independent jobs on a small thread pool; results are indexed, so
/// the output does not depend on scheduling.
template <class Job>
auto parallel_map(std::size_t count, Job job) -> std::vector<decltype(job(std::size_t{}))> {
  std::vector<decltype(job(std::size_t{}))> out(count);
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        out[i] = job(i);
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!error) error = std::current_exception();
      }
    }
  };
  const std::size_t n = std::min<std::size_t>(count, std::max(1u, std::thread::hardware_concurrency()));
  std::vector<std::thread> pool;
  for (std::size_t i = 1; i < n; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
  return out;
}

struct SuiteOptions {
  std::size_t n_seeds = 1;
  std::optional<std::uint64_t> base_seed;  // defaults to each scenario's seed
  BudgetMode budget_mode = BudgetMode::kDeterministic;
};

/// Seed i of a suite run is base + i.
inline std::vector<TrialMetrics> run_seeds(const Scenario& s, PlannerKind planner, const SuiteOptions& opt,
                                           std::optional<std::size_t> alpha = std::nullopt) {
  if (opt.n_seeds < 1) throw ContractViolation("n_seeds must be >= 1");
  const std::uint64_t base = opt.base_seed.value_or(s.seed);
  return parallel_map(opt.n_seeds, [&](std::size_t i) {
    TrialOptions t;
    t.seed = base + i;
    t.alpha = alpha;
    t.budget_mode = opt.budget_mode;
    return run_trial(s, planner, t);
  });
}

/// Mean verified cost per cycle across trials; cycles a trial never reached,
/// or finished without a path, count at the failure sentinel.
inline Series cost_series(const std::string& name, const Scenario& s, const std::vector<TrialMetrics>& trials) {
  std::size_t len = 0;
  for (const auto& t : trials) len = std::max(len, t.cycles.size());
  Series out{name, {}};
  for (std::size_t k = 0; k < len; ++k) {
    double acc = 0.0;
    for (const auto& t : trials) {
      double c = k < t.cycles.size() ? t.cycles[k].verified_cost : (t.success ? t.cost : kInfinity);
      if (!(c < kInfinity)) c = s.failure_cost();
      acc += c;
    }
    out.points.emplace_back(static_cast<double>(k + 1), acc / static_cast<double>(trials.size()));
  }
  return out;
}

inline ReportTable run_suite(const std::vector<Scenario>& scenarios, const std::vector<PlannerKind>& planners,
                             const SuiteOptions& opt) {
  ReportTable table;
  for (const auto& s : scenarios) {
    for (PlannerKind p : planners) {
      const auto trials = run_seeds(s, p, opt);
      table.rows.push_back(aggregate(s.id, planner_name(p), trials));
      table.series.push_back(cost_series(s.id + "_" + planner_name(p) + "_cost", s, trials));
    }
  }
  return table;
}

inline std::string alpha_label(std::size_t alpha) {
  return alpha == kAlphaUnbounded ? std::string("inf") : std::to_string(alpha);
}

struct SweepPoint {
  std::size_t alpha = 0;
  std::vector<TrialMetrics> trials;
  double median_edge_evals = 0.0;
  double median_expansions = 0.0;
};

inline const std::vector<std::size_t>& default_alphas() {
  static const std::vector<std::size_t> a{1, 5, 25, 100, kAlphaUnbounded};
  return a;
}

/// LLPT* over matched seeds for each alpha.
inline std::vector<SweepPoint> sweep_alpha(const Scenario& s, const std::vector<std::size_t>& alphas,
                                           const SuiteOptions& opt) {
  std::vector<SweepPoint> out;
  for (std::size_t a : alphas) {
    SweepPoint p{a, run_seeds(s, PlannerKind::kLlpt, opt, a)};
    std::vector<double> ev, ex;
    for (const auto& t : p.trials) {
      ev.push_back(static_cast<double>(t.edge_evaluations()));
      ex.push_back(static_cast<double>(t.vertex_expansions()));
    }
    p.median_edge_evals = median_of(ev);
    p.median_expansions = median_of(ex);
    out.push_back(std::move(p));
  }
  return out;
}

/// Rows are labelled llpt[alpha=...]; series x is alpha, with inf for unbounded.
inline ReportTable sweep_table(const Scenario& s, const std::vector<SweepPoint>& sweep) {
  ReportTable table;
  Series evals{s.id + "_edge_evals_vs_alpha", {}};
  Series exps{s.id + "_expansions_vs_alpha", {}};
  for (const auto& p : sweep) {
    table.rows.push_back(aggregate(s.id, "llpt[alpha=" + alpha_label(p.alpha) + "]", p.trials));
    const double x = p.alpha == kAlphaUnbounded ? kInfinity : static_cast<double>(p.alpha);
    evals.points.emplace_back(x, p.median_edge_evals);
    exps.points.emplace_back(x, p.median_expansions);
  }
  table.series.push_back(std::move(evals));
  table.series.push_back(std::move(exps));
  return table;
}

class ReportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ReportFormat { kCsv, kPlotData };

inline ReportFormat parse_format(const std::string& s) {
  if (s == "csv") return ReportFormat::kCsv;
  if (s == "plot-data") return ReportFormat::kPlotData;
  throw std::invalid_argument("unknown format '" + s + "' (expected csv or plot-data)");
}

/// %.9g with a fixed spelling for non-finite values.
inline std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline constexpr const char* kCsvHeader =
    "scenario_id,planner,seeds,success_rate,mean_cost,std_cost,mean_edge_evals,mean_expansions,mean_graph_size";

inline std::string render_csv(const ReportTable& table) {
  if (table.rows.empty()) throw ReportError("refusing to write an empty report table");
  std::string out = "# failed trials are charged cost = 10 x space diameter\n";
  out += kCsvHeader;
  out += '\n';
  for (const auto& r : table.rows) {
    out += csv_field(r.scenario_id) + ',' + csv_field(r.planner) + ',' + std::to_string(r.seeds) + ',' +
           format_number(r.success_rate) + ',' + format_number(r.mean_cost) + ',' + format_number(r.std_cost) + ',' +
           format_number(r.mean_edge_evals) + ',' + format_number(r.mean_expansions) + ',' +
           format_number(r.mean_graph_size) + '\n';
  }
  return out;
}

inline std::string render_series(const Series& s) {
  if (s.points.empty()) throw ReportError("series '" + s.name + "' is empty");
  std::string out = "# " + s.name + "\n";
  for (const auto& [x, y] : s.points) out += format_number(x) + ' ' + format_number(y) + '\n';
  return out;
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ReportError("cannot open '" + path.string() + "' for writing");
  out << text;
  out.flush();
  if (!out) throw ReportError("write to '" + path.string() + "' failed");
}

/// CSV goes to `out_path`. Plot data goes to `out_path`/<series>.dat, one file
/// per series. Returns the files written.
inline std::vector<std::filesystem::path> emit_report(const ReportTable& table, const std::filesystem::path& out_path,
                                                      ReportFormat format) {
  if (format == ReportFormat::kCsv) {
    const std::string text = render_csv(table);
    write_file(out_path, text);
    return {out_path};
  }
  if (table.series.empty()) throw ReportError("refusing to write plot data without any series");
  std::vector<std::pair<std::filesystem::path, std::string>> files;
  for (const auto& s : table.series) files.emplace_back(out_path / (s.name + ".dat"), render_series(s));
  std::vector<std::filesystem::path> written;
  for (const auto& [p, text] : files) {
    write_file(p, text);
    written.push_back(p);
  }
  return written;
}

}  // namespace llpt
