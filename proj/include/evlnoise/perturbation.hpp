#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "evlnoise/dynamics.hpp"
#include "evlnoise/random.hpp"

namespace evlnoise {

/// Observational noise eps * xi with xi uniform on the closed unit ball.
struct NoiseSpec {
  double epsilon = 0.0;
  double p = std::numeric_limits<double>::infinity();  // epsilon = 10^-p

  static NoiseSpec none() { return {}; }
  static NoiseSpec from_exponent(double p) { return {std::pow(10.0, -p), p}; }
  bool active() const { return epsilon > 0.0; }
};

/// Instrument precision: values are truncated at the q-th decimal digit.
struct TruncationSpec {
  std::optional<int> digits;

  static TruncationSpec none() { return {}; }
  static TruncationSpec at(int q);
};

/// floor(10^q x) / 10^q, computed so that the result is the largest multiple
/// k / 10^q (as a double) not exceeding x. That makes the operation exactly
/// idempotent, which a plain floor-then-divide is not. Requires 1 <= q <= 15.
double truncate(double x, int q);

/// Draws eps * xi. Uniform on [-1, 1) in one dimension; rejection sampling
/// from the square in two. Draws nothing when eps is zero.
inline Point sample_noise(const NoiseSpec& spec, int dim, RandomStream& rng) {
  if (!spec.active()) return {};
  if (dim == 1) return {spec.epsilon * (2.0 * rng.uniform() - 1.0), 0.0};
  for (;;) {
    const double u = 2.0 * rng.uniform() - 1.0;
    const double v = 2.0 * rng.uniform() - 1.0;
    if (u * u + v * v <= 1.0) return {spec.epsilon * u, spec.epsilon * v};
  }
}

/// trunc(x + eps * xi, q) for a single state. The state itself is untouched.
inline Point observe_point(Point x, int dim, const NoiseSpec& noise,
                           const TruncationSpec& trunc, RandomStream& rng) {
  const Point xi = sample_noise(noise, dim, rng);
  Point y{x.x + xi.x, dim == 2 ? x.y + xi.y : 0.0};
  if (trunc.digits) {
    y.x = truncate(y.x, *trunc.digits);
    if (dim == 2) y.y = truncate(y.y, *trunc.digits);
  }
  return y;
}

/// Observed series of an orbit: one fresh noise draw per iterate, truncation
/// applied after the noise.
std::vector<Point> observe(const Orbit& orbit, int dim, const NoiseSpec& noise,
                           const TruncationSpec& trunc, RandomStream& rng);

}  // namespace evlnoise
