#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace llpt {

/// Raised when a caller breaks a documented precondition.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// A point in a d-dimensional Euclidean configuration space.
class Config {
 public:
  Config() = default;
  explicit Config(std::vector<double> coords) : coords_(std::move(coords)) {}
  Config(std::initializer_list<double> coords) : coords_(coords) {}

  std::size_t dim() const noexcept { return coords_.size(); }
  double operator[](std::size_t i) const { return coords_[i]; }
  double& operator[](std::size_t i) { return coords_[i]; }
  const std::vector<double>& coords() const noexcept { return coords_; }

  bool all_finite() const {
    for (double c : coords_) {
      if (!std::isfinite(c)) return false;
    }
    return true;
  }

  friend bool operator==(const Config&, const Config&) = default;

 private:
  std::vector<double> coords_;
};

inline void require_same_dim(const Config& a, const Config& b) {
  if (a.dim() != b.dim()) {
    throw ContractViolation("config dimension mismatch: " + std::to_string(a.dim()) + " vs " +
                            std::to_string(b.dim()));
  }
}

/// Axis-aligned box that bounds the configuration space.
class SpaceBounds {
 public:
  SpaceBounds(Config lower, Config upper) : lower_(std::move(lower)), upper_(std::move(upper)) {
    require_same_dim(lower_, upper_);
    if (lower_.dim() == 0) throw ContractViolation("bounds must have dimension >= 1");
    for (std::size_t i = 0; i < lower_.dim(); ++i) {
      if (!(lower_[i] < upper_[i]) || !std::isfinite(lower_[i]) || !std::isfinite(upper_[i])) {
        throw ContractViolation("bounds require finite lower[i] < upper[i] in every dimension");
      }
    }
  }

  const Config& lower() const noexcept { return lower_; }
  const Config& upper() const noexcept { return upper_; }
  std::size_t dim() const noexcept { return lower_.dim(); }

  /// Lebesgue measure of the box.
  double measure() const {
    double m = 1.0;
    for (std::size_t i = 0; i < dim(); ++i) m *= upper_[i] - lower_[i];
    return m;
  }

  double max_extent() const {
    double e = 0.0;
    for (std::size_t i = 0; i < dim(); ++i) e = std::max(e, upper_[i] - lower_[i]);
    return e;
  }

  /// Length of the box diagonal.
  double diameter() const {
    double s = 0.0;
    for (std::size_t i = 0; i < dim(); ++i) {
      const double e = upper_[i] - lower_[i];
      s += e * e;
    }
    return std::sqrt(s);
  }

  bool contains(const Config& p) const {
    require_same_dim(p, lower_);
    for (std::size_t i = 0; i < dim(); ++i) {
      if (p[i] < lower_[i] || p[i] > upper_[i]) return false;
    }
    return true;
  }

  friend bool operator==(const SpaceBounds&, const SpaceBounds&) = default;

 private:
  Config lower_;
  Config upper_;
};

inline double distance(const Config& a, const Config& b) {
  require_same_dim(a, b);
  double s = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

/// Moves from `from` toward `to` by at most `delta`.
inline Config steer(const Config& from, const Config& to, double delta) {
  if (!(delta > 0.0)) throw ContractViolation("steer requires delta > 0");
  const double d = distance(from, to);
  if (d <= delta) return to;
  const double s = delta / d;
  Config out = from;
  for (std::size_t i = 0; i < from.dim(); ++i) out[i] = from[i] + (to[i] - from[i]) * s;
  return out;
}

inline Config interpolate(const Config& a, const Config& b, double s) {
  require_same_dim(a, b);
  Config out = a;
  for (std::size_t i = 0; i < a.dim(); ++i) out[i] = a[i] + (b[i] - a[i]) * s;
  return out;
}

/// Contract for edge weights and the admissible heuristic used by the planners.
///
/// `distance` must be a metric that dominates every per-coordinate gap
/// (|a[i] - b[i]| <= distance(a, b)); the spatial index prunes on that bound.
/// `heuristic` must never exceed `distance`.
template <class M>
concept Metric = std::copyable<M> && requires(const M m, const Config& a, const Config& b) {
  { m.distance(a, b) } -> std::convertible_to<double>;
  { m.heuristic(a, b) } -> std::convertible_to<double>;
};

struct EuclideanMetric {
  double distance(const Config& a, const Config& b) const { return llpt::distance(a, b); }
  double heuristic(const Config& a, const Config& b) const { return llpt::distance(a, b); }
};

static_assert(Metric<EuclideanMetric>);

/// Seeded generator shared by every stochastic call of one planner instance.
///
/// Backed by std::mt19937_64, whose output sequence is fixed by the standard.
/// Doubles are built from the top 53 bits so results do not depend on the
/// standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1).
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

 private:
  std::mt19937_64 engine_;
};

inline Config sample_uniform(Rng& rng, const SpaceBounds& bounds) {
  std::vector<double> c(bounds.dim());
  for (std::size_t i = 0; i < c.size(); ++i) {
    c[i] = rng.uniform(bounds.lower()[i], bounds.upper()[i]);
  }
  return Config(std::move(c));
}

inline double heuristic(const Config& a, const Config& b) { return EuclideanMetric{}.heuristic(a, b); }

/// Volume of the unit ball in R^d.
inline double unit_ball_volume(std::size_t d) {
  const double half = static_cast<double>(d) / 2.0;
  return std::pow(std::numbers::pi, half) / std::tgamma(half + 1.0);
}

}  // namespace llpt
