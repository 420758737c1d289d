#include "evlnoise/evt.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/special_functions/gamma.hpp>

namespace evlnoise {
namespace {

constexpr double kLog2 = std::numbers::ln2;
const double kLog2OverLog3 = std::log(2.0) / std::log(3.0);

bool all_finite(std::span<const double> xs) {
  return std::all_of(xs.begin(), xs.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace

double observable(Point point, Point z, int dim) {
  const double dist = distance(point, z, dim);
  if (dist == 0.0) throw InfiniteObservable("observable: point coincides with the target");
  return -std::log(dist);
}

std::vector<double> block_maxima(std::span<const double> series, std::size_t m) {
  if (m < 1) throw PreconditionError("block_maxima: block length must be >= 1");
  if (series.size() < m) {
    throw EmptyBlocks("block_maxima: series of length " + std::to_string(series.size()) +
                      " holds no block of length " + std::to_string(m));
  }
  const std::size_t blocks = series.size() / m;
  std::vector<double> maxima;
  maxima.reserve(blocks);
  for (std::size_t j = 0; j < blocks; ++j) {
    auto block = series.subspan(j * m, m);
    maxima.push_back(*std::max_element(block.begin(), block.end()));
  }
  return maxima;
}

LMoments sample_l_moments(std::span<const double> sample) {
  const std::size_t n = sample.size();
  if (n < 3) throw PreconditionError("sample_l_moments: need at least 3 values");
  std::vector<double> x(sample.begin(), sample.end());
  std::sort(x.begin(), x.end());
  if (x.front() == x.back()) throw DegenerateSample("sample_l_moments: all values equal");

  // l_r = sum_j c_rj x_(j) with the probability-weighted-moment weights
  // combined per order statistic. The l2 and l3 weights sum to zero, so
  // centering at the median and accumulating them directly avoids the
  // cancellation of 2 b1 - b0 after a large shift.
  const double nd = static_cast<double>(n);
  const double centre = x[n / 2];
  double s0 = 0.0, s2 = 0.0, s3 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double j = static_cast<double>(i + 1);
    const double w1 = (j - 1.0) / (nd - 1.0);
    const double w2 = w1 * (j - 2.0) / (nd - 2.0);
    const double v = x[i] - centre;
    s0 += v;
    s2 += (2.0 * w1 - 1.0) * v;
    s3 += (6.0 * w2 - 6.0 * w1 + 1.0) * v;
  }

  LMoments out;
  out.l1 = centre + s0 / nd;
  out.l2 = s2 / nd;
  const double l3 = s3 / nd;
  if (!(out.l2 > 0.0)) throw DegenerateSample("sample_l_moments: non-positive L-scale");
  out.t3 = l3 / out.l2;
  return out;
}

std::string_view to_string(FitStatus status) {
  switch (status) {
    case FitStatus::kOk: return "ok";
    case FitStatus::kTooFewPoints: return "too_few_points";
    case FitStatus::kDegenerateSample: return "degenerate_sample";
    case FitStatus::kFitDiverged: return "fit_diverged";
  }
  return "unknown";
}

GevFit fit_gev(std::span<const double> sample, const GevFitOptions& options) {
  GevFit fit;
  fit.n_sample = sample.size();
  if (sample.size() < std::max<std::size_t>(options.min_sample, 3)) {
    fit.status = FitStatus::kTooFewPoints;
    return fit;
  }
  if (!all_finite(sample)) {
    fit.status = FitStatus::kFitDiverged;
    return fit;
  }

  LMoments lm;
  try {
    lm = sample_l_moments(sample);
  } catch (const DegenerateSample&) {
    fit.status = FitStatus::kDegenerateSample;
    return fit;
  }
  fit.t3 = lm.t3;
  if (!(std::abs(lm.t3) <= options.t3_max)) {
    fit.status = FitStatus::kFitDiverged;
    return fit;
  }

  // Hosking's shape k; the tail index used here is -k.
  const double c = 2.0 / (3.0 + lm.t3) - kLog2OverLog3;
  const double k = 7.8590 * c + 2.9554 * c * c;

  double sigma = 0.0;
  double mu = 0.0;
  if (k == 0.0) {
    sigma = lm.l2 / kLog2;
    mu = lm.l1 - std::numbers::egamma * sigma;
  } else {
    // 1 - 2^-k and Gamma(1 + k) - 1 without cancellation near k = 0.
    const double one_minus_pow = -std::expm1(-k * kLog2);
    const double gamma_minus_one = boost::math::tgamma1pm1(k);
    sigma = lm.l2 * k / (one_minus_pow * (1.0 + gamma_minus_one));
    mu = lm.l1 + sigma * gamma_minus_one / k;
  }
  if (!std::isfinite(sigma) || !std::isfinite(mu) || !(sigma > 0.0)) {
    fit.status = FitStatus::kFitDiverged;
    return fit;
  }

  fit.params = {-k, mu, sigma};
  fit.converged = true;
  fit.status = FitStatus::kOk;
  return fit;
}

double gev_cdf(double y, const GevParams& params) {
  const double s = (y - params.mu) / params.sigma;
  if (params.kappa == 0.0) return std::exp(-std::exp(-s));
  const double base = 1.0 + params.kappa * s;
  if (base <= 0.0) return params.kappa > 0.0 ? 0.0 : 1.0;
  return std::exp(-std::exp(-std::log1p(params.kappa * s) / params.kappa));
}

double gev_quantile(double u, const GevParams& params) {
  if (!(u > 0.0 && u < 1.0)) throw PreconditionError("gev_quantile: u must lie in (0, 1)");
  const double log_tail = std::log(-std::log(u));
  if (params.kappa == 0.0) return params.mu - params.sigma * log_tail;
  return params.mu + params.sigma * std::expm1(-params.kappa * log_tail) / params.kappa;
}

ScalingPrediction theoretical_scaling(std::int64_t m, double epsilon, double nu_ball, int d) {
  if (m < 1) throw PreconditionError("theoretical_scaling: m must be >= 1");
  if (!(epsilon > 0.0)) throw PreconditionError("theoretical_scaling: epsilon must be > 0");
  if (d != 1 && d != 2) throw PreconditionError("theoretical_scaling: d must be 1 or 2");
  if (nu_ball == 0.0) throw ZeroMeasure("theoretical_scaling: target has zero mass at this scale");
  if (!(nu_ball > 0.0 && nu_ball <= 1.0)) {
    throw PreconditionError("theoretical_scaling: nu_ball must lie in (0, 1]");
  }

  ScalingPrediction out;
  out.m = m;
  out.epsilon = epsilon;
  out.d = d;
  out.measure_value = nu_ball;
  out.a_m = static_cast<double>(d);
  const double md = static_cast<double>(m);
  if (d == 1) {
    out.b_m = std::log(md * nu_ball / epsilon);
  } else {
    out.b_m = 0.5 * std::log(std::numbers::pi * md * nu_ball / (epsilon * epsilon));
  }
  return out;
}

double theoretical_bm_fractal(std::int64_t m, double epsilon, double dimension, int d) {
  if (m < 1) throw PreconditionError("theoretical_bm_fractal: m must be >= 1");
  if (!(epsilon > 0.0)) throw PreconditionError("theoretical_bm_fractal: epsilon must be > 0");
  if (!(dimension > 0.0 && dimension <= d)) {
    throw PreconditionError("theoretical_bm_fractal: need 0 < D <= d");
  }
  // Written as a sum of logs so tiny epsilon does not underflow.
  return (std::log(static_cast<double>(m)) + (dimension - d) * std::log(epsilon)) / d;
}

}  // namespace evlnoise
