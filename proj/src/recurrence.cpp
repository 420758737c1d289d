#include "evlnoise/recurrence.hpp"

#include <cmath>

namespace evlnoise {

std::optional<std::int64_t> hitting_time(const MapSystem& map, Point x0, Point z, double radius,
                                         const NoiseSpec& noise, std::int64_t max_steps,
                                         RandomStream& noise_rng, RandomStream* branch_rng) {
  if (radius < 0.0) throw PreconditionError("hitting_time: radius must be >= 0");
  if (max_steps < 1) throw PreconditionError("hitting_time: max_steps must be >= 1");
  const int dim = map.ambient_dim();
  const TruncationSpec no_trunc;
  Point x = x0;
  return first_entry(
      [&] {
        x = iterate(map, x, branch_rng);
        return observe_point(x, dim, noise, no_trunc, noise_rng);
      },
      z, radius, dim, max_steps);
}

std::optional<std::size_t> first_exceedance(std::span<const double> series, double level) {
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (series[i] > level) return i + 1;
  }
  return std::nullopt;
}

std::vector<SurvivalPoint> survival_curve(std::span<const HittingTimeSample> samples,
                                          std::int64_t m, std::span<const double> t_grid,
                                          std::optional<double> rate) {
  if (samples.size() != t_grid.size()) {
    throw PreconditionError("survival_curve: one sample per grid point is required");
  }
  std::vector<SurvivalPoint> out;
  out.reserve(t_grid.size());
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    const HittingTimeSample& s = samples[i];
    if (!(t_grid[i] > 0.0)) throw PreconditionError("survival_curve: t must be positive");
    if (s.realizations() == 0) throw PreconditionError("survival_curve: empty sample");
    if (s.censored > 0 && s.max_steps <= m) {
      throw PreconditionError("survival_curve: censoring below m makes R > m undecidable");
    }
    std::size_t survivors = s.censored;
    for (auto r : s.times) survivors += r > m ? 1 : 0;

    SurvivalPoint pt;
    pt.t = t_grid[i];
    pt.empirical = static_cast<double>(survivors) / static_cast<double>(s.realizations());
    if (rate) pt.theoretical = std::exp(-t_grid[i] * *rate);
    out.push_back(pt);
  }
  return out;
}

}  // namespace evlnoise
