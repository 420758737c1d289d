#include "evlnoise/measure.hpp"

#include <gsl/gsl_fit.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/quadrature/tanh_sinh.hpp>

namespace evlnoise {
namespace {

double pm_profile_mass(double lo, double hi, double alpha) {
  if (!(hi > lo)) return 0.0;
  boost::math::quadrature::tanh_sinh<double> integrator;
  auto profile = [alpha](double x) { return std::pow(x, -alpha); };
  return integrator.integrate(profile, lo, hi);
}

double empirical_mass(const LocalMeasureModel& model, Point z, double epsilon,
                      const MapSystem& map, double* std_error) {
  if (model.orbit_length < 1) throw PreconditionError("local_measure: empirical orbit is empty");
  RandomStream rng(model.seed);
  Point x = sample_initial_condition(map, rng);
  RandomStream* branch = map.is_random() ? &rng : nullptr;
  const int dim = map.ambient_dim();
  std::size_t hits = 0;
  for (std::size_t i = 0; i < model.orbit_length; ++i) {
    if (distance(x, z, dim) <= epsilon) ++hits;
    x = iterate(map, x, branch);
  }
  const double n = static_cast<double>(model.orbit_length);
  const double frac = static_cast<double>(hits) / n;
  *std_error = std::sqrt(frac * (1.0 - frac) / n);
  return frac;
}

}  // namespace

MeasureEstimate local_measure(const LocalMeasureModel& model, Point z, double epsilon,
                              const MapSystem& map) {
  if (!(epsilon > 0.0)) throw PreconditionError("local_measure: epsilon must be > 0");
  const Box& box = map.domain();
  const double lo = std::max(box.lo.x, z.x - epsilon);
  const double hi = std::min(box.hi.x, z.x + epsilon);
  if (model.kind != MeasureKind::kEmpirical && map.ambient_dim() != 1) {
    throw PreconditionError("local_measure: analytic models are one-dimensional");
  }

  MeasureEstimate out;
  switch (model.kind) {
    case MeasureKind::kLebesgueInterval:
      out.value = std::max(0.0, hi - lo) / box.width();
      break;
    case MeasureKind::kHemmerDensity:
      // Density (1 - x)/2 on [-1, 1]; integral over [lo, hi] in closed form.
      if (hi > lo) {
        const double ulo = 1.0 - std::max(lo, -1.0);
        const double uhi = 1.0 - std::min(hi, 1.0);
        out.value = (ulo * ulo - uhi * uhi) / 4.0;
      }
      break;
    case MeasureKind::kPMDensity: {
      if (!(model.alpha > 0.0 && model.alpha < 1.0)) {
        throw PreconditionError("local_measure: PM density needs 0 < alpha < 1");
      }
      const double total = pm_profile_mass(0.0, 1.0, model.alpha);
      out.value = pm_profile_mass(std::max(lo, 0.0), std::min(hi, 1.0), model.alpha) / total;
      break;
    }
    case MeasureKind::kEmpirical:
      out.value = empirical_mass(model, z, epsilon, map, &out.std_error);
      break;
  }
  if (out.value == 0.0) {
    throw ZeroMeasure("local_measure: ball around the target carries no mass at eps = " +
                      std::to_string(epsilon));
  }
  return out;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw PreconditionError("fit_line: x and y differ in length");
  if (x.size() < 2) throw InsufficientPoints("fit_line: need at least two points");
  double c0 = 0.0, c1 = 0.0, cov00 = 0.0, cov01 = 0.0, cov11 = 0.0, sumsq = 0.0;
  gsl_fit_linear(x.data(), 1, y.data(), 1, x.size(), &c0, &c1, &cov00, &cov01, &cov11, &sumsq);
  LineFit fit;
  fit.intercept = c0;
  fit.slope = c1;
  fit.residual_ss = sumsq;
  fit.slope_stderr = x.size() > 2 ? std::sqrt(cov11) : std::numeric_limits<double>::quiet_NaN();
  return fit;
}

DimensionEstimate estimate_dimension(std::span<const ScanPoint> points, int d,
                                     double plateau_threshold) {
  if (d < 1) throw PreconditionError("estimate_dimension: d must be >= 1");
  if (points.size() < 3) throw InsufficientPoints("estimate_dimension: need at least 3 points");

  std::vector<ScanPoint> sorted(points.begin(), points.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const ScanPoint& a, const ScanPoint& b) { return a.p < b.p; });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i].p == sorted[i - 1].p) throw PreconditionError("estimate_dimension: repeated p");
  }

  auto column = [](std::span<const ScanPoint> pts, auto member) {
    std::vector<double> out;
    out.reserve(pts.size());
    for (const auto& pt : pts) out.push_back(pt.*member);
    return out;
  };

  const std::size_t n = sorted.size();
  const std::size_t half = std::max<std::size_t>(2, (n + 1) / 2);
  const std::span<const ScanPoint> low(sorted.data(), half);
  const double reference =
      fit_line(column(low, &ScanPoint::p), column(low, &ScanPoint::b_m)).slope;

  auto pair_slope = [&](std::size_t i) {
    return (sorted[i].b_m - sorted[i - 1].b_m) / (sorted[i].p - sorted[i - 1].p);
  };
  bool flat = true;
  for (std::size_t i = 1; i < n; ++i) {
    flat = flat && std::abs(pair_slope(i)) < plateau_threshold * std::abs(reference);
  }
  if (!std::isfinite(reference) || reference == 0.0 || flat) {
    throw NoSignal("estimate_dimension: b_m shows no dependence on p");
  }

  std::size_t keep = n;
  while (keep > 1 && std::abs(pair_slope(keep - 1)) < plateau_threshold * std::abs(reference)) {
    --keep;
  }

  DimensionEstimate est;
  est.points_used.assign(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(keep));
  est.points_discarded.assign(sorted.begin() + static_cast<std::ptrdiff_t>(keep), sorted.end());
  if (keep < 3) {
    throw InsufficientPoints("estimate_dimension: only " + std::to_string(keep) +
                             " points left after plateau exclusion");
  }

  const LineFit fit = fit_line(column(est.points_used, &ScanPoint::p),
                               column(est.points_used, &ScanPoint::b_m));
  const double dd = static_cast<double>(d);
  est.slope = fit.slope;
  est.intercept = fit.intercept;
  est.dimension = dd - dd * fit.slope / std::numbers::ln10;
  est.std_error = dd * fit.slope_stderr / std::numbers::ln10;
  return est;
}

}  // namespace evlnoise
