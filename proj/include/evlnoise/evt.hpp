#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "evlnoise/dynamics.hpp"

namespace evlnoise {

/// -log ||point - z||. Throws InfiniteObservable when the two coincide.
double observable(Point point, Point z, int dim);

/// Maxima of consecutive disjoint blocks of length m; a trailing partial block
/// is dropped. Throws EmptyBlocks when the series is shorter than m.
std::vector<double> block_maxima(std::span<const double> series, std::size_t m);

/// First two sample L-moments and the L-skewness, from probability-weighted
/// moments of the sorted sample (unbiased estimators).
struct LMoments {
  double l1 = 0.0;
  double l2 = 0.0;
  double t3 = 0.0;
};

LMoments sample_l_moments(std::span<const double> sample);

/// GEV parameters in the tail-index convention: kappa > 0 Frechet,
/// kappa < 0 Weibull, kappa = 0 Gumbel.
struct GevParams {
  double kappa = 0.0;
  double mu = 0.0;
  double sigma = 1.0;
};

enum class FitStatus { kOk, kTooFewPoints, kDegenerateSample, kFitDiverged };

std::string_view to_string(FitStatus status);

struct GevFit {
  GevParams params;
  double t3 = 0.0;
  std::size_t n_sample = 0;
  bool converged = false;
  FitStatus status = FitStatus::kFitDiverged;
};

struct GevFitOptions {
  std::size_t min_sample = 20;
  double t3_max = 0.9;
};

/// L-moment GEV fit with Hosking's rational approximation for the shape.
/// Never throws: failures are reported through `converged` and `status`, so
/// experiment drivers can count them.
GevFit fit_gev(std::span<const double> sample, const GevFitOptions& options = {});

/// G(y) = exp(-[1 + kappa (y - mu) / sigma]^(-1/kappa)), saturating at 0 or 1
/// outside the support; the Gumbel form when kappa == 0.
double gev_cdf(double y, const GevParams& params);

/// Inverse of gev_cdf on (0, 1).
double gev_quantile(double u, const GevParams& params);

/// Normalizing sequences u_m = u / a_m + b_m for the log-distance observable
/// under uniform observational noise of size epsilon.
struct ScalingPrediction {
  double a_m = 1.0;
  double b_m = 0.0;
  std::int64_t m = 0;
  double epsilon = 0.0;
  int d = 1;
  double measure_value = 0.0;
};

/// d = 1: a_m = 1, b_m = log(m nu / eps).
/// d = 2: a_m = 2, b_m = log(pi m nu / eps^2) / 2.
/// `nu_ball` is the invariant mass of the ball B(z, eps).
ScalingPrediction theoretical_scaling(std::int64_t m, double epsilon, double nu_ball, int d);

/// (1/d) log(m eps^(D - d)): b_m when nu(B(z, eps)) ~ eps^D, up to an additive
/// constant.
double theoretical_bm_fractal(std::int64_t m, double epsilon, double dimension, int d);

}  // namespace evlnoise
