#include "evlnoise/perturbation.hpp"

#include <array>
#include <string>

namespace evlnoise {
namespace {

constexpr std::array<double, 16> kPowersOfTen = {
    1e0, 1e1, 1e2, 1e3, 1e4, 1e5, 1e6, 1e7, 1e8, 1e9, 1e10, 1e11, 1e12, 1e13, 1e14, 1e15};

void check_digits(int q) {
  if (q < 1 || q > 15) {
    throw PreconditionError("truncation digit q must lie in [1, 15], got " + std::to_string(q));
  }
}

}  // namespace

TruncationSpec TruncationSpec::at(int q) {
  check_digits(q);
  return TruncationSpec{q};
}

double truncate(double x, int q) {
  check_digits(q);
  const double scale = kPowersOfTen[static_cast<std::size_t>(q)];
  double k = std::floor(x * scale);
  // x * scale is rounded, so the floor can be off by one in either direction.
  if (k / scale > x) k -= 1.0;
  if ((k + 1.0) / scale <= x) k += 1.0;
  return k / scale;
}

std::vector<Point> observe(const Orbit& orbit, int dim, const NoiseSpec& noise,
                           const TruncationSpec& trunc, RandomStream& rng) {
  if (orbit.points.empty()) throw PreconditionError("observe: empty orbit");
  if (trunc.digits) check_digits(*trunc.digits);
  std::vector<Point> observed;
  observed.reserve(orbit.points.size());
  for (const Point& x : orbit.points) {
    observed.push_back(observe_point(x, dim, noise, trunc, rng));
  }
  return observed;
}

}  // namespace evlnoise
