#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "evlnoise/dynamics.hpp"

namespace evlnoise {

enum class MeasureKind { kLebesgueInterval, kHemmerDensity, kPMDensity, kEmpirical };

/// How nu(B(z, eps)) is obtained: from a known density or by Birkhoff
/// averaging along one long seeded orbit.
struct LocalMeasureModel {
  MeasureKind kind = MeasureKind::kLebesgueInterval;
  double alpha = 0.3;                    // exponent of the x^-alpha profile
  std::size_t orbit_length = 1'000'000;  // empirical only
  std::uint64_t seed = 0;                // empirical only
};

struct MeasureEstimate {
  double value = 0.0;
  double std_error = 0.0;  // binomial standard error, zero for analytic models
};

/// Invariant mass of the closed ball B(z, eps), clipped to the domain.
/// Throws ZeroMeasure when the result is exactly zero.
MeasureEstimate local_measure(const LocalMeasureModel& model, Point z, double epsilon,
                              const MapSystem& map);

/// Ordinary least squares y = intercept + slope x.
struct LineFit {
  double intercept = 0.0;
  double slope = 0.0;
  double slope_stderr = 0.0;
  double residual_ss = 0.0;
};

LineFit fit_line(std::span<const double> x, std::span<const double> y);

struct ScanPoint {
  double p = 0.0;    // epsilon = 10^-p
  double b_m = 0.0;  // fitted location at that noise level
};

struct DimensionEstimate {
  double dimension = 0.0;
  double slope = 0.0;
  double intercept = 0.0;
  double std_error = 0.0;  // standard error of the dimension
  std::vector<ScanPoint> points_used;
  std::vector<ScanPoint> points_discarded;
};

/// Local dimension from a b_m-versus-p scan. Trailing points that no longer
/// depend on p (the plateau) are dropped first: walking down from the largest
/// p, a point is discarded while the slope joining it to its predecessor is
/// below `plateau_threshold` times the slope fitted on the low-p half. The
/// remaining points are fitted by least squares and D = d - d slope / ln 10.
DimensionEstimate estimate_dimension(std::span<const ScanPoint> points, int d,
                                     double plateau_threshold = 0.25);

}  // namespace evlnoise
