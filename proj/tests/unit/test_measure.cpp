#include <doctest.h>

#include <cmath>
#include <vector>

#include "evlnoise/evt.hpp"
#include "evlnoise/measure.hpp"

using namespace evlnoise;
using doctest::Approx;

namespace {

LocalMeasureModel model(MeasureKind kind) {
  LocalMeasureModel m;
  m.kind = kind;
  return m;
}

std::vector<ScanPoint> superformula_scan(double D, int d, std::int64_t m,
                                         const std::vector<double>& ps) {
  std::vector<ScanPoint> out;
  for (double p : ps) out.push_back({p, theoretical_bm_fractal(m, std::pow(10.0, -p), D, d)});
  return out;
}

}  // namespace

TEST_CASE("analytic measures") {
  const auto ternary = MapSystem::ternary_shift();
  CHECK(local_measure(model(MeasureKind::kLebesgueInterval), {0.5, 0}, 0.01, ternary).value ==
        Approx(0.02).epsilon(1e-12));
  CHECK(local_measure(model(MeasureKind::kLebesgueInterval), {0.0, 0}, 0.1, ternary).value ==
        Approx(0.1).epsilon(1e-12));

  const auto hemmer = MapSystem::hemmer();
  CHECK(local_measure(model(MeasureKind::kHemmerDensity), {1.0, 0}, 0.01, hemmer).value ==
        Approx(2.5e-5).epsilon(1e-10));
  // Near -1 the density is 1 and the ball is clipped to [-1, -1 + eps].
  const double eps = 0.01;
  CHECK(local_measure(model(MeasureKind::kHemmerDensity), {-1.0, 0}, eps, hemmer).value ==
        Approx((4.0 - (2.0 - eps) * (2.0 - eps)) / 4.0).epsilon(1e-12));
  CHECK(local_measure(model(MeasureKind::kHemmerDensity), {0.0, 0}, 1.0, hemmer).value ==
        Approx(1.0).epsilon(1e-12));

  const auto pm = MapSystem::pomeau_manneville(0.3);
  auto pm_model = model(MeasureKind::kPMDensity);
  pm_model.alpha = 0.3;
  CHECK(local_measure(pm_model, {0.0, 0}, 1e-3, pm).value ==
        Approx(std::pow(1e-3, 0.7)).epsilon(1e-9));
  CHECK(local_measure(pm_model, {0.5, 0}, 0.1, pm).value ==
        Approx(std::pow(0.6, 0.7) - std::pow(0.4, 0.7)).epsilon(1e-9));

  CHECK_THROWS_AS(local_measure(model(MeasureKind::kLebesgueInterval), {0.5, 0}, 0.0, ternary),
                  PreconditionError);
  CHECK_THROWS_AS(local_measure(model(MeasureKind::kLebesgueInterval), {3.0, 0}, 0.1, ternary),
                  ZeroMeasure);
}

TEST_CASE("Hemmer sporadic exponent") {
  const auto hemmer = MapSystem::hemmer();
  std::vector<double> x, y;
  for (double eps : {1e-1, 1e-2, 1e-3}) {
    x.push_back(std::log(eps));
    y.push_back(std::log(local_measure(model(MeasureKind::kHemmerDensity), {1.0, 0}, eps, hemmer).value));
  }
  CHECK(std::abs(fit_line(x, y).slope - 2.0) <= 0.05);
}

TEST_CASE("empirical measure") {
  auto empirical = model(MeasureKind::kEmpirical);
  empirical.orbit_length = 1'000'000;
  empirical.seed = 3;
  CHECK_THROWS_AS(local_measure(empirical, {0.5, 0}, 0.1, MapSystem::cantor_ifs()), ZeroMeasure);

  const auto ternary = MapSystem::ternary_shift();
  RandomStream rng(12);
  for (int i = 0; i < 20; ++i) {
    const Point z{rng.uniform(), 0};
    const double eps = std::pow(10.0, -rng.uniform(1.0, 2.5));
    empirical.seed = static_cast<std::uint64_t>(100 + i);
    const MeasureEstimate e = local_measure(empirical, z, eps, ternary);
    const double exact = local_measure(model(MeasureKind::kLebesgueInterval), z, eps, ternary).value;
    CHECK(e.std_error > 0.0);
    CHECK_MESSAGE(std::abs(e.value - exact) <= 4.0 * e.std_error, "z=", z.x, " eps=", eps);
  }

  // Reproducible for a fixed seed.
  empirical.seed = 5;
  empirical.orbit_length = 10'000;
  const auto lozi = MapSystem::lozi();
  const double a = local_measure(empirical, {0.5, 0.1}, 0.2, lozi).value;
  CHECK(a == local_measure(empirical, {0.5, 0.1}, 0.2, lozi).value);
}

TEST_CASE("fit_line") {
  const std::vector<double> x{0, 1, 2, 3};
  const std::vector<double> y{1, 3, 5, 7};
  const LineFit f = fit_line(x, y);
  CHECK(f.slope == Approx(2.0).epsilon(1e-14));
  CHECK(f.intercept == Approx(1.0).epsilon(1e-14));
  CHECK(f.residual_ss == Approx(0.0).epsilon(1e-20));
  CHECK_THROWS_AS(fit_line(std::vector<double>{1}, std::vector<double>{1}), InsufficientPoints);
}

TEST_CASE("dimension from exact data") {
  const double cantor = std::log(2.0) / std::log(3.0);
  const auto scan = superformula_scan(cantor, 1, 1000, {1, 2, 3, 4, 5, 6});
  const DimensionEstimate e = estimate_dimension(scan, 1);
  CHECK(std::abs(e.dimension - cantor) < 1e-12);
  CHECK(e.points_used.size() == 6);
  CHECK(e.points_discarded.empty());

  const auto lozi = superformula_scan(1.40419, 2, 30'000, {1, 2, 3});
  CHECK(std::abs(estimate_dimension(lozi, 2).dimension - 1.40419) < 1e-12);

  // Only the slope matters.
  auto shifted = scan;
  for (auto& s : shifted) s.b_m += 17.25;
  CHECK(estimate_dimension(shifted, 1).dimension == Approx(e.dimension).epsilon(1e-12));
}

TEST_CASE("plateau exclusion") {
  const double cantor = std::log(2.0) / std::log(3.0);
  auto scan = superformula_scan(cantor, 1, 1000, {1, 2, 3, 4, 5});
  const double top = scan.back().b_m;
  scan.push_back({6, top + 0.01});
  scan.push_back({7, top + 0.015});
  scan.push_back({8, top + 0.012});
  const DimensionEstimate e = estimate_dimension(scan, 1);
  CHECK(std::abs(e.dimension - cantor) < 1e-12);
  REQUIRE(e.points_discarded.size() == 3);
  CHECK(e.points_used.size() + e.points_discarded.size() == scan.size());
  // Discarded points form a suffix in p.
  for (const auto& d : e.points_discarded) {
    for (const auto& u : e.points_used) CHECK(d.p > u.p);
  }

  // A flat middle point followed by growth is not a plateau.
  auto dip = superformula_scan(cantor, 1, 1000, {1, 2, 3, 4, 5});
  dip[2].b_m = dip[1].b_m;
  CHECK(estimate_dimension(dip, 1).points_discarded.empty());
}

TEST_CASE("dimension errors") {
  std::vector<ScanPoint> flat{{1, 5.0}, {2, 5.0}, {3, 5.0}, {4, 5.0}};
  CHECK_THROWS_AS(estimate_dimension(flat, 1), NoSignal);
  std::vector<ScanPoint> two{{1, 5.0}, {2, 6.0}};
  CHECK_THROWS_AS(estimate_dimension(two, 1), InsufficientPoints);
  auto early = superformula_scan(0.5, 1, 1000, {1, 2});
  early.push_back({3, early.back().b_m});
  early.push_back({4, early.back().b_m});
  CHECK_THROWS_AS(estimate_dimension(early, 1), InsufficientPoints);
  std::vector<ScanPoint> repeated{{1, 5.0}, {1, 6.0}, {2, 7.0}};
  CHECK_THROWS_AS(estimate_dimension(repeated, 1), PreconditionError);
}
