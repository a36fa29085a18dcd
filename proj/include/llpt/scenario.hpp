#pragma once

#include <cstdint>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "llpt/llpt_planner.hpp"
#include "llpt/world.hpp"

namespace llpt {

inline constexpr int kScenarioSchemaVersion = 1;

/// Parse or validation failure; `field()` names the offending JSON path.
class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(std::string field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

enum class ScenarioMode { kStatic, kDynamic };

struct ScenarioBudget {
  std::size_t extensions_per_cycle = 1000;
  std::size_t max_cycles = 1;
  std::size_t expansions_per_cycle = 0;  // 0 = unlimited
  double wallclock_per_cycle = 0.05;     // seconds, wall-clock mode only
  friend bool operator==(const ScenarioBudget&, const ScenarioBudget&) = default;
};

struct RobotParams {
  double speed = 1.0;
  double cycle_period = 0.1;
  friend bool operator==(const RobotParams&, const RobotParams&) = default;
};

struct Scenario {
  std::string id;
  ScenarioMode mode = ScenarioMode::kStatic;
  SpaceBounds bounds{Config(std::vector<double>{0.0}), Config(std::vector<double>{1.0})};
  std::vector<Obstacle> obstacles;
  std::vector<EpochEvent> epochs;
  Config start;
  Config goal;
  PlannerParams planner;
  ScenarioBudget budget;
  RobotParams robot;
  std::uint64_t seed = 0;

  WorldTimeline timeline() const { return WorldTimeline(bounds, obstacles, epochs); }

  /// Cost charged to failed trials: ten times the space diameter.
  double failure_cost() const { return 10.0 * bounds.diameter(); }

  friend bool operator==(const Scenario& a, const Scenario& b) {
    return a.id == b.id && a.mode == b.mode && a.bounds == b.bounds && a.obstacles == b.obstacles &&
           a.epochs == b.epochs && a.start == b.start && a.goal == b.goal && a.planner.alpha == b.planner.alpha &&
           a.planner.delta == b.planner.delta && a.planner.gamma_s == b.planner.gamma_s &&
           a.planner.resolution == b.planner.resolution && a.budget == b.budget && a.robot == b.robot &&
           a.seed == b.seed;
  }
};

namespace detail {

using nlohmann::json;

inline const json& require(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) throw ScenarioError(path, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) throw ScenarioError(path.empty() ? key : path + "." + key, "missing required field");
  return *it;
}

inline std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

inline double get_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ScenarioError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ScenarioError(path, "must be finite");
  return v;
}

inline double get_positive(const json& j, const std::string& path) {
  const double v = get_number(j, path);
  if (!(v > 0.0)) throw ScenarioError(path, "must be > 0");
  return v;
}

inline std::size_t get_count(const json& j, const std::string& path, bool allow_zero) {
  if (!j.is_number_integer() || j.get<long long>() < (allow_zero ? 0 : 1)) {
    throw ScenarioError(path, allow_zero ? "expected a non-negative integer" : "expected a positive integer");
  }
  return j.get<std::size_t>();
}

inline Config get_config(const json& j, const std::string& path, std::size_t dim) {
  if (!j.is_array()) throw ScenarioError(path, "expected an array of numbers");
  if (dim != 0 && j.size() != dim) {
    throw ScenarioError(path, "expected " + std::to_string(dim) + " coordinates, got " + std::to_string(j.size()));
  }
  std::vector<double> c;
  for (std::size_t i = 0; i < j.size(); ++i) c.push_back(get_number(j[i], path + "[" + std::to_string(i) + "]"));
  return Config(std::move(c));
}

inline json config_json(const Config& c) { return json(c.coords()); }

inline Obstacle parse_obstacle(const json& j, const std::string& path, std::size_t dim) {
  Obstacle o;
  o.id = [&] {
    const json& id = require(j, "id", path);
    if (!id.is_string()) throw ScenarioError(join(path, "id"), "expected a string");
    return id.get<std::string>();
  }();
  if (j.contains("sphere")) {
    const std::string p = join(path, "sphere");
    const json& s = j["sphere"];
    o.shape = Sphere{get_config(require(s, "center", p), join(p, "center"), dim),
                     get_positive(require(s, "radius", p), join(p, "radius"))};
  } else if (j.contains("box")) {
    const std::string p = join(path, "box");
    const json& b = j["box"];
    Box box{get_config(require(b, "lower", p), join(p, "lower"), dim),
            get_config(require(b, "upper", p), join(p, "upper"), dim)};
    for (std::size_t i = 0; i < dim; ++i) {
      if (!(box.lower[i] < box.upper[i])) throw ScenarioError(p, "lower must be < upper componentwise");
    }
    o.shape = std::move(box);
  } else {
    throw ScenarioError(path, "obstacle needs a 'sphere' or 'box' shape");
  }
  if (j.contains("motion")) {
    const std::string p = join(path, "motion");
    const json& m = j["motion"];
    LinearMotion motion;
    motion.velocity = get_config(require(m, "velocity", p), join(p, "velocity"), dim);
    if (m.contains("t_begin")) motion.t_begin = get_number(m["t_begin"], join(p, "t_begin"));
    if (m.contains("t_end")) {
      if (m["t_end"].is_string() && m["t_end"].get<std::string>() == "inf") {
        motion.t_end = kInfinity;
      } else {
        motion.t_end = get_number(m["t_end"], join(p, "t_end"));
      }
    }
    if (!(motion.t_begin <= motion.t_end)) throw ScenarioError(p, "t_begin must be <= t_end");
    o.motion = std::move(motion);
  }
  return o;
}

inline json obstacle_json(const Obstacle& o) {
  json j;
  j["id"] = o.id;
  if (const auto* s = std::get_if<Sphere>(&o.shape)) {
    j["sphere"] = {{"center", config_json(s->center)}, {"radius", s->radius}};
  } else {
    const auto& b = std::get<Box>(o.shape);
    j["box"] = {{"lower", config_json(b.lower)}, {"upper", config_json(b.upper)}};
  }
  if (o.motion) {
    json m;
    m["velocity"] = config_json(o.motion->velocity);
    m["t_begin"] = o.motion->t_begin;
    if (o.motion->t_end == kInfinity) {
      m["t_end"] = "inf";
    } else {
      m["t_end"] = o.motion->t_end;
    }
    j["motion"] = std::move(m);
  }
  return j;
}

inline void check_endpoint(const Scenario& s, const Config& c, const std::string& field) {
  if (!s.bounds.contains(c)) throw ScenarioError(field, "outside the space bounds");
  for (const auto& o : s.obstacles) {
    if (point_in_shape(c, o.shape)) throw ScenarioError(field, "inside obstacle '" + o.id + "'");
  }
  const WorldSnapshot w0 = s.timeline().at(0.0);
  if (point_in_collision(c, w0)) throw ScenarioError(field, "in collision at t=0");
}

}  // namespace detail

/// Parses and validates a scenario document.
inline Scenario parse_scenario(const std::string& text) {
  using detail::json;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioError("<document>", std::string("parse error at byte ") + std::to_string(e.byte) + ": " + e.what());
  }
  if (!j.is_object()) throw ScenarioError("<document>", "expected a JSON object");

  const json& version = detail::require(j, "schema_version", "");
  if (!version.is_number_integer() || version.get<int>() != kScenarioSchemaVersion) {
    throw ScenarioError("schema_version", "unsupported version (expected " + std::to_string(kScenarioSchemaVersion) + ")");
  }

  const json& b = detail::require(j, "bounds", "");
  Config lower = detail::get_config(detail::require(b, "lower", "bounds"), "bounds.lower", 0);
  if (lower.dim() == 0) throw ScenarioError("bounds.lower", "dimension must be >= 1");
  Config upper = detail::get_config(detail::require(b, "upper", "bounds"), "bounds.upper", lower.dim());
  for (std::size_t i = 0; i < lower.dim(); ++i) {
    if (!(lower[i] < upper[i])) throw ScenarioError("bounds", "lower must be < upper componentwise");
  }
  const std::size_t dim = lower.dim();

  Scenario s;
  s.bounds = SpaceBounds(std::move(lower), std::move(upper));
  s.id = j.value("id", std::string("scenario"));
  const std::string mode = j.value("mode", std::string("static"));
  if (mode == "static") {
    s.mode = ScenarioMode::kStatic;
  } else if (mode == "dynamic") {
    s.mode = ScenarioMode::kDynamic;
  } else {
    throw ScenarioError("mode", "expected 'static' or 'dynamic'");
  }
  s.start = detail::get_config(detail::require(j, "start", ""), "start", dim);
  s.goal = detail::get_config(detail::require(j, "goal", ""), "goal", dim);

  if (j.contains("obstacles")) {
    const json& arr = j["obstacles"];
    if (!arr.is_array()) throw ScenarioError("obstacles", "expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      s.obstacles.push_back(detail::parse_obstacle(arr[i], "obstacles[" + std::to_string(i) + "]", dim));
    }
  }

  if (j.contains("epochs")) {
    const json& arr = j["epochs"];
    if (!arr.is_array()) throw ScenarioError("epochs", "expected an array");
    double last = -kInfinity;
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string p = "epochs[" + std::to_string(i) + "]";
      const json& e = arr[i];
      const double t = detail::get_number(detail::require(e, "time", p), p + ".time");
      if (t < 0.0) throw ScenarioError(p + ".time", "must be >= 0");
      if (!(t > last)) throw ScenarioError(p + ".time", "epoch times must be strictly increasing");
      last = t;
      if (e.contains("add")) {
        s.epochs.push_back(EpochEvent::add(t, detail::parse_obstacle(e["add"], p + ".add", dim)));
      } else if (e.contains("remove")) {
        if (!e["remove"].is_string()) throw ScenarioError(p + ".remove", "expected an obstacle id");
        s.epochs.push_back(EpochEvent::remove(t, e["remove"].get<std::string>()));
      } else if (e.contains("translate")) {
        const std::string tp = p + ".translate";
        const json& tr = e["translate"];
        const json& id = detail::require(tr, "id", tp);
        if (!id.is_string()) throw ScenarioError(tp + ".id", "expected a string");
        s.epochs.push_back(EpochEvent::translate(
            t, id.get<std::string>(), detail::get_config(detail::require(tr, "offset", tp), tp + ".offset", dim)));
      } else {
        throw ScenarioError(p, "epoch needs one of 'add', 'remove', 'translate'");
      }
    }
  }

  if (j.contains("planner")) {
    const json& p = j["planner"];
    if (!p.is_object()) throw ScenarioError("planner", "expected an object");
    if (p.contains("alpha")) {
      const json& a = p["alpha"];
      if (a.is_string() && a.get<std::string>() == "inf") {
        s.planner.alpha = kAlphaUnbounded;
      } else {
        s.planner.alpha = detail::get_count(a, "planner.alpha", false);
      }
    }
    if (p.contains("gamma_s")) s.planner.gamma_s = detail::get_positive(p["gamma_s"], "planner.gamma_s");
    if (p.contains("resolution")) {
      s.planner.resolution = detail::get_positive(p["resolution"], "planner.resolution");
      if (s.planner.resolution > 1.0) throw ScenarioError("planner.resolution", "must lie in (0, 1]");
    }
    if (p.contains("delta")) {
      s.planner.delta = detail::get_positive(p["delta"], "planner.delta");
    } else {
      s.planner.delta = 0.1 * s.bounds.max_extent();
    }
  } else {
    s.planner.delta = 0.1 * s.bounds.max_extent();
  }

  if (j.contains("budget")) {
    const json& bj = j["budget"];
    if (!bj.is_object()) throw ScenarioError("budget", "expected an object");
    if (bj.contains("extensions_per_cycle")) {
      s.budget.extensions_per_cycle = detail::get_count(bj["extensions_per_cycle"], "budget.extensions_per_cycle", true);
    }
    if (bj.contains("max_cycles")) s.budget.max_cycles = detail::get_count(bj["max_cycles"], "budget.max_cycles", false);
    if (bj.contains("expansions_per_cycle")) {
      s.budget.expansions_per_cycle = detail::get_count(bj["expansions_per_cycle"], "budget.expansions_per_cycle", true);
    }
    if (bj.contains("wallclock_per_cycle")) {
      s.budget.wallclock_per_cycle = detail::get_positive(bj["wallclock_per_cycle"], "budget.wallclock_per_cycle");
    }
  }

  if (j.contains("robot")) {
    const json& r = j["robot"];
    if (!r.is_object()) throw ScenarioError("robot", "expected an object");
    if (r.contains("speed")) s.robot.speed = detail::get_positive(r["speed"], "robot.speed");
    if (r.contains("cycle_period")) s.robot.cycle_period = detail::get_positive(r["cycle_period"], "robot.cycle_period");
  }

  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !(j["seed"].is_number_integer() && j["seed"].get<long long>() >= 0)) {
      throw ScenarioError("seed", "expected a non-negative integer");
    }
    s.seed = j["seed"].get<std::uint64_t>();
  }

  try {
    (void)s.timeline();
  } catch (const ContractViolation& e) {
    throw ScenarioError("obstacles", e.what());
  }
  detail::check_endpoint(s, s.start, "start");
  detail::check_endpoint(s, s.goal, "goal");
  return s;
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("<file>", "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

/// Canonical form: every field written out, fixed key order, two-space indent.
inline std::string serialize_scenario(const Scenario& s) {
  using nlohmann::ordered_json;
  auto cfg = [](const Config& c) { return ordered_json(c.coords()); };
  auto obstacle = [&](const Obstacle& o) { return ordered_json::parse(detail::obstacle_json(o).dump()); };
  ordered_json j;
  j["schema_version"] = kScenarioSchemaVersion;
  j["id"] = s.id;
  j["mode"] = s.mode == ScenarioMode::kStatic ? "static" : "dynamic";
  j["bounds"] = {{"lower", cfg(s.bounds.lower())}, {"upper", cfg(s.bounds.upper())}};
  j["start"] = cfg(s.start);
  j["goal"] = cfg(s.goal);
  j["obstacles"] = ordered_json::array();
  for (const auto& o : s.obstacles) j["obstacles"].push_back(obstacle(o));
  j["epochs"] = ordered_json::array();
  for (const auto& e : s.epochs) {
    ordered_json ej;
    ej["time"] = e.time;
    switch (e.kind) {
      case EpochEvent::Kind::kAdd:
        ej["add"] = obstacle(e.obstacle);
        break;
      case EpochEvent::Kind::kRemove:
        ej["remove"] = e.target;
        break;
      case EpochEvent::Kind::kTranslate:
        ej["translate"] = {{"id", e.target}, {"offset", cfg(e.offset)}};
        break;
    }
    j["epochs"].push_back(std::move(ej));
  }
  ordered_json p;
  if (s.planner.alpha == kAlphaUnbounded) {
    p["alpha"] = "inf";
  } else {
    p["alpha"] = s.planner.alpha;
  }
  p["delta"] = s.planner.delta;
  p["gamma_s"] = s.planner.gamma_s;
  p["resolution"] = s.planner.resolution;
  j["planner"] = std::move(p);
  j["budget"] = {{"extensions_per_cycle", s.budget.extensions_per_cycle},
                 {"max_cycles", s.budget.max_cycles},
                 {"expansions_per_cycle", s.budget.expansions_per_cycle},
                 {"wallclock_per_cycle", s.budget.wallclock_per_cycle}};
  j["robot"] = {{"speed", s.robot.speed}, {"cycle_period", s.robot.cycle_period}};
  j["seed"] = s.seed;
  return j.dump(2) + "\n";
}

}  // namespace llpt
