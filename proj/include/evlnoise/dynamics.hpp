#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "evlnoise/errors.hpp"
#include "evlnoise/random.hpp"

namespace evlnoise {

/// A point of the ambient space. One-dimensional systems leave `y` at zero.
struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

/// Euclidean distance in dimension `dim` (1 or 2).
inline double distance(Point a, Point b, int dim) {
  if (dim == 1) return std::abs(a.x - b.x);
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

/// Closed axis-aligned box.
struct Box {
  Point lo;
  Point hi;

  bool contains(Point p, int dim) const {
    if (!(p.x >= lo.x && p.x <= hi.x)) return false;
    return dim == 1 || (p.y >= lo.y && p.y <= hi.y);
  }
  double width() const { return hi.x - lo.x; }
};

enum class MapKind { kTernaryShift, kHemmer, kPomeauManneville, kCantorIFS, kLozi };

struct MapParams {
  double alpha = 0.3;  // Pomeau-Manneville intermittency exponent
  double a = 1.7;      // Lozi
  double b = 0.5;      // Lozi
  double q1 = 0.5;     // weight of the x/3 branch of the Cantor IFS
};

/// One member of the catalog of maps, with its parameters and the box used for
/// domain checks.
class MapSystem {
 public:
  static MapSystem ternary_shift();
  static MapSystem hemmer();
  static MapSystem pomeau_manneville(double alpha = 0.3);
  static MapSystem cantor_ifs(double q1 = 0.5);
  static MapSystem lozi(double a = 1.7, double b = 0.5);

  /// Builds a map from its catalog name (see catalog_names()). Only the
  /// parameters that belong to the selected map are read.
  static MapSystem from_name(std::string_view name, const MapParams& params = {});

  /// The five catalog names, in a fixed order.
  static std::span<const std::string_view> catalog_names();

  MapKind kind() const { return kind_; }
  std::string_view name() const;
  const MapParams& params() const { return params_; }
  const Box& domain() const { return domain_; }
  int ambient_dim() const { return kind_ == MapKind::kLozi ? 2 : 1; }
  bool is_random() const { return kind_ == MapKind::kCantorIFS; }
  std::size_t default_burn_in() const { return is_random() ? 40 : 1000; }
  bool contains(Point p) const { return domain_.contains(p, ambient_dim()); }

  /// 2^alpha, the gain of the laminar Pomeau-Manneville branch.
  double pm_gain() const { return pm_gain_; }

 private:
  MapSystem(MapKind kind, MapParams params, Box domain)
      : kind_(kind), params_(params), domain_(domain), pm_gain_(std::pow(2.0, params.alpha)) {}

  MapKind kind_;
  MapParams params_;
  Box domain_;
  double pm_gain_;
};

enum class IfsBranch { kFirst, kSecond };

namespace detail {

[[noreturn]] void throw_domain_violation(const MapSystem& map, Point x);
[[noreturn]] void throw_branch_mismatch(const MapSystem& map);

inline double ternary_step(double x) {
  double y = 3.0 * x;
  y -= std::floor(y);
  if (y >= 1.0) y -= 1.0;
  return y;
}

inline Point deterministic_step(const MapSystem& map, Point p) {
  const MapParams& c = map.params();
  switch (map.kind()) {
    case MapKind::kTernaryShift:
      return {ternary_step(p.x), 0.0};
    case MapKind::kHemmer:
      // -1 is a fixed point; handled exactly by the formula.
      return {1.0 - 2.0 * std::sqrt(std::abs(p.x)), 0.0};
    case MapKind::kPomeauManneville:
      if (p.x <= 0.5) {
        // Rounding can push T(1/2) = 1 past the right end.
        return {std::min(1.0, p.x + map.pm_gain() * std::pow(p.x, 1.0 + c.alpha)), 0.0};
      }
      return {2.0 * p.x - 1.0, 0.0};
    case MapKind::kLozi:
      return {p.y + 1.0 - c.a * std::abs(p.x), c.b * p.x};
    case MapKind::kCantorIFS:
      break;
  }
  throw_branch_mismatch(map);
}

}  // namespace detail

/// Applies one IFS branch: x/3 or (x + 2)/3.
inline Point apply_branch(Point p, IfsBranch branch) {
  return branch == IfsBranch::kFirst ? Point{p.x / 3.0, 0.0}
                                     : Point{(p.x + 2.0) / 3.0, 0.0};
}

/// One step of the map. `branch_rng` must be given exactly when the map is
/// random; a random map consumes one uniform draw per step.
inline Point iterate(const MapSystem& map, Point x, RandomStream* branch_rng = nullptr) {
  if (!map.contains(x)) detail::throw_domain_violation(map, x);
  if (map.is_random() != (branch_rng != nullptr)) detail::throw_branch_mismatch(map);
  if (map.is_random()) {
    const bool first = branch_rng->uniform() < map.params().q1;
    return apply_branch(x, first ? IfsBranch::kFirst : IfsBranch::kSecond);
  }
  return detail::deterministic_step(map, x);
}

struct Orbit {
  std::vector<Point> points;
  MapKind map = MapKind::kTernaryShift;
  std::optional<std::uint64_t> seed;  // branch stream seed, random maps only
  std::size_t burn_in = 0;
};

/// Discards `burn_in` iterates of x0 and then records `length` points, the
/// first of which is the post-burn-in state itself.
Orbit generate_orbit(const MapSystem& map, Point x0, std::size_t length,
                     std::size_t burn_in, RandomStream* branch_rng = nullptr);

/// Uniform draw from the domain followed by burn-in, so the returned point is
/// numerically on the attractor. For the Lozi map the box is not forward
/// invariant everywhere, so draws whose burn-in leaves the box are rejected
/// and redrawn; NonConvergent is raised only if no draw survives. Random maps
/// take their branch choices from the same stream.
Point sample_initial_condition(const MapSystem& map, RandomStream& rng,
                               std::optional<std::size_t> burn_in = std::nullopt);

}  // namespace evlnoise
