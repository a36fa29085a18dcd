#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "llpt/state_space.hpp"

namespace llpt {

struct Sphere {
  Config center;
  double radius = 0.0;
  friend bool operator==(const Sphere&, const Sphere&) = default;
};

struct Box {
  Config lower;
  Config upper;
  friend bool operator==(const Box&, const Box&) = default;
};

using Shape = std::variant<Sphere, Box>;

/// Constant-velocity drift applied while t is inside [t_begin, t_end].
struct LinearMotion {
  Config velocity;
  double t_begin = 0.0;
  double t_end = kInfinity;
  friend bool operator==(const LinearMotion&, const LinearMotion&) = default;
};

struct Obstacle {
  std::string id;
  Shape shape;
  std::optional<LinearMotion> motion;
  friend bool operator==(const Obstacle&, const Obstacle&) = default;
};

inline void validate_shape(const Shape& shape) {
  if (const auto* s = std::get_if<Sphere>(&shape)) {
    if (!(s->radius > 0.0) || !std::isfinite(s->radius)) throw ContractViolation("sphere radius must be > 0");
    if (!s->center.all_finite()) throw ContractViolation("sphere center must be finite");
  } else {
    const auto& b = std::get<Box>(shape);
    require_same_dim(b.lower, b.upper);
    for (std::size_t i = 0; i < b.lower.dim(); ++i) {
      if (!(b.lower[i] < b.upper[i])) throw ContractViolation("box requires lower < upper componentwise");
    }
  }
}

inline Shape translated(const Shape& shape, const Config& offset) {
  auto shift = [&](const Config& c) {
    Config out = c;
    for (std::size_t i = 0; i < c.dim(); ++i) out[i] += offset[i];
    return out;
  };
  if (const auto* s = std::get_if<Sphere>(&shape)) return Sphere{shift(s->center), s->radius};
  const auto& b = std::get<Box>(shape);
  return Box{shift(b.lower), shift(b.upper)};
}

/// One scripted change to the obstacle set.
struct EpochEvent {
  enum class Kind { kAdd, kRemove, kTranslate };

  double time = 0.0;
  Kind kind = Kind::kAdd;
  Obstacle obstacle;   // kAdd
  std::string target;  // kRemove, kTranslate
  Config offset;       // kTranslate

  static EpochEvent add(double t, Obstacle o) { return {t, Kind::kAdd, std::move(o), {}, {}}; }
  static EpochEvent remove(double t, std::string id) { return {t, Kind::kRemove, {}, std::move(id), {}}; }
  static EpochEvent translate(double t, std::string id, Config offset) {
    return {t, Kind::kTranslate, {}, std::move(id), std::move(offset)};
  }

  friend bool operator==(const EpochEvent&, const EpochEvent&) = default;
};

/// Frozen obstacle set at one query time.
class WorldSnapshot {
 public:
  WorldSnapshot(SpaceBounds bounds, std::vector<Shape> shapes)
      : bounds_(std::move(bounds)), shapes_(std::move(shapes)) {}

  const SpaceBounds& bounds() const noexcept { return bounds_; }
  const std::vector<Shape>& shapes() const noexcept { return shapes_; }

 private:
  SpaceBounds bounds_;
  std::vector<Shape> shapes_;
};

/// Scripted environment: initial obstacles plus time-ordered mutations.
class WorldTimeline {
 public:
  explicit WorldTimeline(SpaceBounds bounds, std::vector<Obstacle> obstacles = {},
                         std::vector<EpochEvent> epochs = {})
      : bounds_(std::move(bounds)), obstacles_(std::move(obstacles)), epochs_(std::move(epochs)) {
    for (const auto& o : obstacles_) check_obstacle(o);
    for (std::size_t i = 0; i < epochs_.size(); ++i) {
      if (!(epochs_[i].time >= 0.0)) throw ContractViolation("epoch times must be >= 0");
      if (i > 0 && !(epochs_[i - 1].time < epochs_[i].time)) {
        throw ContractViolation("epoch times must be strictly increasing");
      }
      if (epochs_[i].kind == EpochEvent::Kind::kAdd) check_obstacle(epochs_[i].obstacle);
      if (epochs_[i].kind == EpochEvent::Kind::kTranslate && epochs_[i].offset.dim() != bounds_.dim()) {
        throw ContractViolation("translate offset dimension mismatch");
      }
    }
  }

  const SpaceBounds& bounds() const noexcept { return bounds_; }
  const std::vector<Obstacle>& obstacles() const noexcept { return obstacles_; }
  const std::vector<EpochEvent>& epochs() const noexcept { return epochs_; }

  /// Obstacle set with every epoch at time <= t applied and drifting obstacles advanced to t.
  WorldSnapshot at(double t) const {
    if (!(t >= 0.0)) throw ContractViolation("world_at requires t >= 0");
    std::vector<Obstacle> current = obstacles_;
    for (const auto& e : epochs_) {
      if (e.time > t) break;
      switch (e.kind) {
        case EpochEvent::Kind::kAdd:
          current.push_back(e.obstacle);
          break;
        case EpochEvent::Kind::kRemove:
          std::erase_if(current, [&](const Obstacle& o) { return o.id == e.target; });
          break;
        case EpochEvent::Kind::kTranslate:
          for (auto& o : current) {
            if (o.id == e.target) o.shape = translated(o.shape, e.offset);
          }
          break;
      }
    }
    std::vector<Shape> shapes;
    shapes.reserve(current.size());
    for (const auto& o : current) {
      if (!o.motion) {
        shapes.push_back(o.shape);
        continue;
      }
      const auto& m = *o.motion;
      const double elapsed = std::max(0.0, std::min(t, m.t_end) - m.t_begin);
      Config offset = m.velocity;
      for (std::size_t i = 0; i < offset.dim(); ++i) offset[i] *= elapsed;
      shapes.push_back(translated(o.shape, offset));
    }
    return WorldSnapshot(bounds_, std::move(shapes));
  }

  friend bool operator==(const WorldTimeline&, const WorldTimeline&) = default;

 private:
  void check_obstacle(const Obstacle& o) const {
    validate_shape(o.shape);
    const std::size_t d = std::holds_alternative<Sphere>(o.shape) ? std::get<Sphere>(o.shape).center.dim()
                                                                   : std::get<Box>(o.shape).lower.dim();
    if (d != bounds_.dim()) throw ContractViolation("obstacle '" + o.id + "' dimension mismatch");
    if (o.motion) {
      if (o.motion->velocity.dim() != d) throw ContractViolation("obstacle '" + o.id + "' velocity dimension");
      if (!(o.motion->t_begin <= o.motion->t_end)) throw ContractViolation("obstacle '" + o.id + "' motion interval");
    }
  }

  SpaceBounds bounds_;
  std::vector<Obstacle> obstacles_;
  std::vector<EpochEvent> epochs_;
};

inline WorldSnapshot world_at(const WorldTimeline& timeline, double t) { return timeline.at(t); }

/// Closed-set test: boundary contact counts.
inline bool point_in_shape(const Config& p, const Shape& shape) {
  if (const auto* s = std::get_if<Sphere>(&shape)) return distance(p, s->center) <= s->radius;
  const auto& b = std::get<Box>(shape);
  require_same_dim(p, b.lower);
  for (std::size_t i = 0; i < p.dim(); ++i) {
    if (p[i] < b.lower[i] || p[i] > b.upper[i]) return false;
  }
  return true;
}

/// True if p lies inside any obstacle or outside the space bounds.
inline bool point_in_collision(const Config& p, const WorldSnapshot& w) {
  if (!w.bounds().contains(p)) return true;
  return std::ranges::any_of(w.shapes(), [&](const Shape& s) { return point_in_shape(p, s); });
}

/// Discretized segment check. Samples are spaced at most
/// `resolution * max_extent` apart along the segment, endpoints included.
inline bool edge_in_collision(const Config& a, const Config& b, const WorldSnapshot& w, double resolution) {
  if (!(resolution > 0.0) || resolution > 1.0) throw ContractViolation("resolution must lie in (0, 1]");
  const double len = distance(a, b);
  const double step = resolution * w.bounds().max_extent();
  const auto n = static_cast<std::size_t>(std::ceil(len / step));
  if (n == 0) return point_in_collision(a, w);
  for (std::size_t k = 0; k <= n; ++k) {
    const Config p = k == n ? b : interpolate(a, b, static_cast<double>(k) / static_cast<double>(n));
    if (point_in_collision(p, w)) return true;
  }
  return false;
}

}  // namespace llpt
