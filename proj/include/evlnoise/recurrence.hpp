#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "evlnoise/dynamics.hpp"
#include "evlnoise/perturbation.hpp"

namespace evlnoise {

/// First-entry times of noisy orbits into B(z, radius), one per realization.
struct HittingTimeSample {
  std::vector<std::int64_t> times;
  std::size_t censored = 0;
  std::int64_t max_steps = 0;
  Point z;
  double radius = 0.0;
  double epsilon = 0.0;
  MapKind map = MapKind::kTernaryShift;

  std::size_t realizations() const { return times.size() + censored; }
};

/// Least j in [1, max_steps] whose observation next() (called once per step)
/// lies within `radius` of z. A zero radius never hits.
template <typename Next>
std::optional<std::int64_t> first_entry(Next&& next, Point z, double radius, int dim,
                                        std::int64_t max_steps) {
  for (std::int64_t j = 1; j <= max_steps; ++j) {
    const Point y = next();
    if (radius > 0.0 && distance(y, z, dim) <= radius) return j;
  }
  return std::nullopt;
}

/// Least j in [1, max_steps] with ||T^j x0 + eps xi_j - z|| <= radius, drawing
/// one fresh noise vector per step from `noise_rng`. Returns nullopt when the
/// orbit is censored at max_steps.
std::optional<std::int64_t> hitting_time(const MapSystem& map, Point x0, Point z, double radius,
                                         const NoiseSpec& noise, std::int64_t max_steps,
                                         RandomStream& noise_rng,
                                         RandomStream* branch_rng = nullptr);

/// 1-based index of the first element of `series` strictly above `level`.
/// With series[j-1] = X_j this is the hitting time of {X > level}, and
/// max(series) <= level holds exactly when no such index exists.
std::optional<std::size_t> first_exceedance(std::span<const double> series, double level);

struct SurvivalPoint {
  double t = 0.0;
  double empirical = 0.0;
  std::optional<double> theoretical;
};

/// Empirical survival P((t/m) R > t) = P(R > m) for the sample taken at each
/// t, next to exp(-t * rate) when `rate` = nu(B(z, eps)) / eps is known.
/// `samples[i]` must have been drawn with radius t_grid[i] / m.
std::vector<SurvivalPoint> survival_curve(std::span<const HittingTimeSample> samples,
                                          std::int64_t m, std::span<const double> t_grid,
                                          std::optional<double> rate);

}  // namespace evlnoise
