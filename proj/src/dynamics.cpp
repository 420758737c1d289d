#include "evlnoise/dynamics.hpp"

#include <array>
#include <sstream>

namespace evlnoise {
namespace {

constexpr std::array<std::string_view, 5> kCatalog = {
    "ternary_shift", "hemmer", "pomeau_manneville", "cantor_ifs", "lozi"};

constexpr int kMaxInitialDraws = 1000;

}  // namespace

MapSystem MapSystem::ternary_shift() {
  return MapSystem(MapKind::kTernaryShift, {}, Box{{0.0, 0.0}, {1.0, 0.0}});
}

MapSystem MapSystem::hemmer() {
  return MapSystem(MapKind::kHemmer, {}, Box{{-1.0, 0.0}, {1.0, 0.0}});
}

MapSystem MapSystem::pomeau_manneville(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw PreconditionError("pomeau_manneville: alpha must lie in (0, 1)");
  }
  MapParams params;
  params.alpha = alpha;
  return MapSystem(MapKind::kPomeauManneville, params, Box{{0.0, 0.0}, {1.0, 0.0}});
}

MapSystem MapSystem::cantor_ifs(double q1) {
  if (!(q1 > 0.0 && q1 < 1.0)) {
    throw PreconditionError("cantor_ifs: branch weight q1 must lie in (0, 1)");
  }
  MapParams params;
  params.q1 = q1;
  return MapSystem(MapKind::kCantorIFS, params, Box{{0.0, 0.0}, {1.0, 0.0}});
}

MapSystem MapSystem::lozi(double a, double b) {
  MapParams params;
  params.a = a;
  params.b = b;
  return MapSystem(MapKind::kLozi, params, Box{{-1.5, -0.75}, {1.5, 0.75}});
}

MapSystem MapSystem::from_name(std::string_view name, const MapParams& params) {
  if (name == "ternary_shift") return ternary_shift();
  if (name == "hemmer") return hemmer();
  if (name == "pomeau_manneville") return pomeau_manneville(params.alpha);
  if (name == "cantor_ifs") return cantor_ifs(params.q1);
  if (name == "lozi") return lozi(params.a, params.b);
  throw ConfigError("unknown map '" + std::string(name) + "'");
}

std::span<const std::string_view> MapSystem::catalog_names() { return kCatalog; }

std::string_view MapSystem::name() const {
  return kCatalog[static_cast<std::size_t>(kind_)];
}

namespace detail {

void throw_domain_violation(const MapSystem& map, Point x) {
  std::ostringstream msg;
  msg.precision(17);
  msg << map.name() << ": point (" << x.x;
  if (map.ambient_dim() == 2) msg << ", " << x.y;
  msg << ") is outside the domain";
  throw DomainViolation(msg.str());
}

void throw_branch_mismatch(const MapSystem& map) {
  throw PreconditionError(std::string(map.name()) +
                          (map.is_random() ? ": random map needs a branch stream"
                                           : ": deterministic map takes no branch stream"));
}

}  // namespace detail

Orbit generate_orbit(const MapSystem& map, Point x0, std::size_t length,
                     std::size_t burn_in, RandomStream* branch_rng) {
  if (length < 1) throw PreconditionError("generate_orbit: length must be >= 1");
  Orbit orbit;
  orbit.map = map.kind();
  orbit.burn_in = burn_in;
  if (branch_rng != nullptr) orbit.seed = branch_rng->seed();

  Point x = x0;
  for (std::size_t i = 0; i < burn_in; ++i) x = iterate(map, x, branch_rng);
  if (!map.contains(x)) detail::throw_domain_violation(map, x);

  orbit.points.reserve(length);
  orbit.points.push_back(x);
  for (std::size_t i = 1; i < length; ++i) {
    x = iterate(map, x, branch_rng);
    orbit.points.push_back(x);
  }
  if (!map.contains(x)) detail::throw_domain_violation(map, x);
  return orbit;
}

Point sample_initial_condition(const MapSystem& map, RandomStream& rng,
                               std::optional<std::size_t> burn_in) {
  const std::size_t steps = burn_in.value_or(map.default_burn_in());
  RandomStream* branch = map.is_random() ? &rng : nullptr;
  const Box& box = map.domain();

  for (int attempt = 0; attempt < kMaxInitialDraws; ++attempt) {
    Point x{rng.uniform(box.lo.x, box.hi.x), 0.0};
    if (map.ambient_dim() == 2) x.y = rng.uniform(box.lo.y, box.hi.y);
    bool escaped = false;
    for (std::size_t i = 0; i < steps && !escaped; ++i) {
      x = map.is_random() ? iterate(map, x, branch) : detail::deterministic_step(map, x);
      escaped = !map.contains(x);
    }
    if (!escaped) return x;
  }
  throw NonConvergent(std::string(map.name()) +
                      ": no initial draw stayed in the domain during burn-in");
}

}  // namespace evlnoise
