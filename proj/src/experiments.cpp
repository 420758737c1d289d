#include "evlnoise/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <thread>

#include <fmt/format.h>

#include "evlnoise/recurrence.hpp"

namespace evlnoise {
namespace {

std::string format_point(Point z, int dim) {
  if (dim == 1) return fmt::format("{:.17g}", z.x);
  return fmt::format("{:.17g};{:.17g}", z.x, z.y);
}

[[noreturn]] void config_error(std::string_view field, std::string_view what) {
  throw ConfigError(fmt::format("{}: {}", field, what));
}

LocalMeasureModel measure_model(const ExperimentConfig& cfg, std::uint64_t seed) {
  LocalMeasureModel model;
  switch (cfg.measure) {
    case MeasureChoice::kLebesgue: model.kind = MeasureKind::kLebesgueInterval; break;
    case MeasureChoice::kHemmer: model.kind = MeasureKind::kHemmerDensity; break;
    case MeasureChoice::kPM: model.kind = MeasureKind::kPMDensity; break;
    case MeasureChoice::kEmpirical: model.kind = MeasureKind::kEmpirical; break;
    case MeasureChoice::kNone: throw PreconditionError("measure_model: no measure configured");
  }
  model.alpha = cfg.map_params.alpha;
  model.orbit_length = cfg.empirical_length;
  model.seed = seed;
  return model;
}

// Row index layout: target, then parameter (q or p), then m, then realization.
struct Grid {
  std::size_t targets = 0;
  std::size_t params = 0;
  std::size_t ms = 0;
  std::size_t realizations = 0;

  std::size_t cells() const { return targets * params * ms; }
  std::size_t rows() const { return cells() * realizations; }
};

struct RowIndex {
  std::size_t target = 0;
  std::size_t param = 0;
  std::size_t m = 0;
  std::size_t realization = 0;
  std::size_t cell = 0;
};

RowIndex decode(const Grid& g, std::size_t i) {
  RowIndex idx;
  idx.realization = i % g.realizations;
  idx.cell = i / g.realizations;
  idx.m = idx.cell % g.ms;
  idx.param = (idx.cell / g.ms) % g.params;
  idx.target = idx.cell / (g.ms * g.params);
  return idx;
}

ResultRow run_fit_row(const ExperimentConfig& cfg, const MapSystem& map, const RowIndex& idx) {
  const RandomStreamPolicy policy(cfg.base_seed);
  const int dim = map.ambient_dim();
  const bool truncation = cfg.kind == ExperimentKind::kTruncation;

  ResultRow row;
  row.experiment = cfg.kind;
  row.map = std::string(map.name());
  row.dim = dim;
  row.m = cfg.m_list[idx.m];
  row.realization = idx.realization;
  row.cell = idx.cell;

  Point z = resolve_target(cfg.targets[idx.target], map, cfg.base_seed, idx.realization,
                           idx.target, cfg.burn_in);
  NoiseSpec noise = NoiseSpec::none();
  TruncationSpec trunc = TruncationSpec::none();
  if (truncation) {
    row.q = cfg.q_list[idx.param];
    trunc = TruncationSpec::at(*row.q);
    z.x = truncate(z.x, *row.q);
    if (dim == 2) z.y = truncate(z.y, *row.q);
  } else {
    row.p = cfg.p_list[idx.param];
    noise = NoiseSpec::from_exponent(*row.p);
  }
  row.z = z;

  RandomStream orbit_rng = policy.stream(StreamRole::kOrbit, idx.realization, idx.cell);
  RandomStream noise_rng = policy.stream(StreamRole::kNoise, idx.realization, idx.cell);
  row.seed = orbit_rng.seed();
  const Point x0 = sample_initial_condition(map, orbit_rng, cfg.burn_in);

  const MaximaRun run =
      noisy_block_maxima(map, x0, z, static_cast<std::size_t>(row.m), cfg.n_blocks, noise, trunc,
                         map.is_random() ? &orbit_rng : nullptr, noise_rng);
  row.hit_target = run.hit_target;
  if (!run.hit_target) {
    const GevFit fit = fit_gev(run.maxima, cfg.fit);
    row.status = fit.status;
    if (fit.converged) row.fit = fit.params;
  }

  if (cfg.kind == ExperimentKind::kBmConvergence && cfg.measure != MeasureChoice::kNone) {
    const auto model =
        measure_model(cfg, policy.seed_for(StreamRole::kMeasure, idx.realization, idx.target));
    try {
      const double nu = local_measure(model, z, noise.epsilon, map).value;
      row.bm_theory = theoretical_scaling(row.m, noise.epsilon, nu, dim).b_m;
    } catch (const ZeroMeasure&) {
      row.bm_theory.reset();
    }
  } else if (cfg.kind == ExperimentKind::kDimension && cfg.reference_dimension) {
    row.bm_theory = theoretical_bm_fractal(row.m, noise.epsilon, *cfg.reference_dimension, dim);
  }
  return row;
}

std::vector<ResultRow> run_fit_grid(const ExperimentConfig& cfg, unsigned threads) {
  cfg.validate();
  const MapSystem map = cfg.map();
  Grid grid;
  grid.targets = cfg.targets.size();
  grid.params = cfg.kind == ExperimentKind::kTruncation ? cfg.q_list.size() : cfg.p_list.size();
  grid.ms = cfg.m_list.size();
  grid.realizations = cfg.realizations;

  std::vector<ResultRow> rows(grid.rows());
  parallel_for(rows.size(), threads,
               [&](std::size_t i) { rows[i] = run_fit_row(cfg, map, decode(grid, i)); });
  return rows;
}

double sample_mean(std::span<const double> xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

MomentSummary moments(std::span<const double> xs) {
  MomentSummary s;
  s.mean = sample_mean(xs);
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double v : xs) ss += (v - s.mean) * (v - s.mean);
    s.stdev = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return s;
}

}  // namespace

std::string_view to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kTruncation: return "truncation";
    case ExperimentKind::kBmConvergence: return "bm_convergence";
    case ExperimentKind::kDimension: return "dimension";
    case ExperimentKind::kHittingTime: return "hitting_time";
  }
  return "unknown";
}

ExperimentKind parse_experiment_kind(std::string_view text) {
  for (auto kind : {ExperimentKind::kTruncation, ExperimentKind::kBmConvergence,
                    ExperimentKind::kDimension, ExperimentKind::kHittingTime}) {
    if (text == to_string(kind)) return kind;
  }
  config_error("kind", fmt::format("unknown experiment kind '{}'", text));
}

std::string_view to_string(MeasureChoice choice) {
  switch (choice) {
    case MeasureChoice::kNone: return "none";
    case MeasureChoice::kLebesgue: return "lebesgue";
    case MeasureChoice::kHemmer: return "hemmer";
    case MeasureChoice::kPM: return "pm";
    case MeasureChoice::kEmpirical: return "empirical";
  }
  return "unknown";
}

std::string TargetSpec::label() const {
  switch (kind) {
    case Kind::kLiteral:
      return point.y == 0.0 ? fmt::format("{:.17g}", point.x)
                            : fmt::format("{:.17g};{:.17g}", point.x, point.y);
    case Kind::kAttractorRandom: return "attractor_random";
    case Kind::kSporadic: return "sporadic";
    case Kind::kRecurrent: return "recurrent";
  }
  return "unknown";
}

void ExperimentConfig::validate() const {
  MapSystem system = [&] {
    try {
      return map();
    } catch (const Error& e) {
      config_error("map", e.what());
    }
  }();
  if (realizations < 1) config_error("realizations", "must be >= 1");
  if (n_blocks < 1) config_error("n_blocks", "must be >= 1");
  if (m_list.empty()) config_error("m_list", "must not be empty");
  for (auto m : m_list) {
    if (m < 1) config_error("m_list", "block lengths must be >= 1");
  }
  if (targets.empty()) config_error("z", "at least one target is required");
  const auto max_m = static_cast<std::size_t>(*std::max_element(m_list.begin(), m_list.end()));
  if (n_blocks * max_m > max_orbit_length) {
    config_error("n_blocks", fmt::format("n_blocks * max(m_list) = {} exceeds max_orbit_length = {}",
                                         n_blocks * max_m, max_orbit_length));
  }
  if (!(plateau_threshold > 0.0)) config_error("plateau_threshold", "must be > 0");
  if (!(fit.t3_max > 0.0 && fit.t3_max < 1.0)) config_error("t3_max", "must lie in (0, 1)");

  for (const auto& t : targets) {
    const bool pm = system.kind() == MapKind::kPomeauManneville;
    const bool hm = system.kind() == MapKind::kHemmer;
    if (t.kind == TargetSpec::Kind::kSporadic && !hm) {
      config_error("z", "'sporadic' is defined for the hemmer map only");
    }
    if (t.kind == TargetSpec::Kind::kRecurrent && !pm) {
      config_error("z", "'recurrent' is defined for the pomeau_manneville map only");
    }
    if (t.kind == TargetSpec::Kind::kLiteral && system.ambient_dim() == 1 && t.point.y != 0.0) {
      config_error("z", "one-dimensional map takes scalar targets");
    }
  }

  if (kind == ExperimentKind::kTruncation) {
    if (q_list.empty()) config_error("q_list", "must not be empty");
    for (int q : q_list) {
      if (q < 1 || q > 15) config_error("q_list", "digits must lie in [1, 15]");
    }
    if (!p_list.empty()) config_error("p_list", "the truncation experiment takes no noise");
  } else {
    if (p_list.empty()) config_error("p_list", "must not be empty");
    for (double p : p_list) {
      if (!std::isfinite(p) || p <= 0.0) config_error("p_list", "exponents must be finite and > 0");
    }
    if (!q_list.empty()) config_error("q_list", "only the truncation experiment truncates");
  }

  if (kind == ExperimentKind::kDimension) {
    if (system.kind() != MapKind::kCantorIFS && system.kind() != MapKind::kLozi) {
      config_error("map", "the dimension experiment runs on cantor_ifs or lozi");
    }
    if (reference_dimension &&
        !(*reference_dimension > 0.0 && *reference_dimension <= system.ambient_dim())) {
      config_error("reference_dimension", "must lie in (0, d]");
    }
  }
  if (measure == MeasureChoice::kHemmer && system.kind() != MapKind::kHemmer) {
    config_error("measure", "'hemmer' density belongs to the hemmer map");
  }
  if (measure == MeasureChoice::kPM && system.kind() != MapKind::kPomeauManneville) {
    config_error("measure", "'pm' density belongs to the pomeau_manneville map");
  }
  if (measure != MeasureChoice::kNone && measure != MeasureChoice::kEmpirical &&
      system.ambient_dim() != 1) {
    config_error("measure", "analytic measures are one-dimensional");
  }
  if (kind == ExperimentKind::kHittingTime) {
    if (system.ambient_dim() != 1) config_error("map", "hitting-time law is one-dimensional");
    if (t_grid.empty()) config_error("t_grid", "must not be empty");
    for (double t : t_grid) {
      if (!(t > 0.0)) config_error("t_grid", "values must be > 0");
    }
    if (max_steps_factor < 2) config_error("max_steps_factor", "must be >= 2");
    for (const auto& t : targets) {
      if (t.kind == TargetSpec::Kind::kAttractorRandom) {
        config_error("z", "hitting-time runs need a fixed target");
      }
    }
  }
}

MaximaRun noisy_block_maxima(const MapSystem& map, Point x0, Point z, std::size_t m,
                             std::size_t n_blocks, const NoiseSpec& noise,
                             const TruncationSpec& trunc, RandomStream* branch_rng,
                             RandomStream& noise_rng) {
  if (m < 1 || n_blocks < 1) throw PreconditionError("noisy_block_maxima: empty run");
  const int dim = map.ambient_dim();
  MaximaRun run;
  run.maxima.reserve(n_blocks);
  Point x = x0;
  bool first = true;
  for (std::size_t j = 0; j < n_blocks; ++j) {
    // -log is decreasing, so the block maximum is -log of the closest approach.
    double closest = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
      if (!first) x = iterate(map, x, branch_rng);
      first = false;
      const Point y = observe_point(x, dim, noise, trunc, noise_rng);
      closest = std::min(closest, distance(y, z, dim));
    }
    if (closest == 0.0) {
      run.hit_target = true;
      return run;
    }
    run.maxima.push_back(-std::log(closest));
  }
  return run;
}

Point resolve_target(const TargetSpec& target, const MapSystem& map, std::uint64_t base_seed,
                     std::size_t realization, std::size_t target_index,
                     std::optional<std::size_t> burn_in) {
  switch (target.kind) {
    case TargetSpec::Kind::kLiteral: return target.point;
    case TargetSpec::Kind::kSporadic:
      if (map.kind() == MapKind::kHemmer) return {1.0, 0.0};
      break;
    case TargetSpec::Kind::kRecurrent:
      if (map.kind() == MapKind::kPomeauManneville) return {0.0, 0.0};
      break;
    case TargetSpec::Kind::kAttractorRandom: {
      RandomStream rng =
          RandomStreamPolicy(base_seed).stream(StreamRole::kTarget, realization, target_index);
      return sample_initial_condition(map, rng, burn_in);
    }
  }
  throw ConfigError("z: selector '" + target.label() + "' has no named point on " +
                    std::string(map.name()));
}

std::vector<ResultRow> run_truncation_experiment(const ExperimentConfig& config,
                                                 unsigned threads) {
  if (config.kind != ExperimentKind::kTruncation) config_error("kind", "expected truncation");
  return run_fit_grid(config, threads);
}

std::vector<ResultRow> run_bm_convergence_experiment(const ExperimentConfig& config,
                                                     unsigned threads) {
  if (config.kind != ExperimentKind::kBmConvergence) config_error("kind", "expected bm_convergence");
  return run_fit_grid(config, threads);
}

ExperimentResult run_dimension_experiment(const ExperimentConfig& config, unsigned threads) {
  if (config.kind != ExperimentKind::kDimension) config_error("kind", "expected dimension");
  ExperimentResult result;
  result.kind = config.kind;
  result.rows = run_fit_grid(config, threads);
  result.dimension = summarize_dimension(result.rows, config.map().ambient_dim(),
                                         config.plateau_threshold);
  return result;
}

std::vector<SurvivalRow> run_hitting_time_experiment(const ExperimentConfig& config,
                                                     unsigned threads) {
  if (config.kind != ExperimentKind::kHittingTime) config_error("kind", "expected hitting_time");
  config.validate();
  const MapSystem map = config.map();
  const RandomStreamPolicy policy(config.base_seed);
  const std::size_t P = config.p_list.size();
  const std::size_t M = config.m_list.size();
  const std::size_t L = config.t_grid.size();
  const std::size_t Z = config.targets.size();
  const std::size_t R = config.realizations;

  // Layout: target, p, m, t, realization.
  std::vector<std::optional<std::int64_t>> times(Z * P * M * L * R);
  parallel_for(times.size(), threads, [&](std::size_t i) {
    const std::size_t r = i % R;
    const std::size_t cell = i / R;
    const std::size_t l = cell % L;
    const std::size_t j = (cell / L) % M;
    const std::size_t k = (cell / (L * M)) % P;
    const std::size_t zi = cell / (L * M * P);
    const std::int64_t m = config.m_list[j];
    const Point z = resolve_target(config.targets[zi], map, config.base_seed, r, zi, config.burn_in);
    // Streams ignore t, so a larger ball is entered no later than a smaller
    // one and each survival curve is monotone.
    const std::size_t stream_cell = (zi * P + k) * M + j;
    RandomStream orbit_rng = policy.stream(StreamRole::kOrbit, r, stream_cell);
    RandomStream noise_rng = policy.stream(StreamRole::kNoise, r, stream_cell);
    const Point x0 = sample_initial_condition(map, orbit_rng, config.burn_in);
    times[i] = hitting_time(map, x0, z, config.t_grid[l] / static_cast<double>(m),
                            NoiseSpec::from_exponent(config.p_list[k]),
                            config.max_steps_factor * m, noise_rng,
                            map.is_random() ? &orbit_rng : nullptr);
  });

  std::vector<SurvivalRow> out;
  for (std::size_t zi = 0; zi < Z; ++zi) {
    const Point z = resolve_target(config.targets[zi], map, config.base_seed, 0, zi, config.burn_in);
    for (std::size_t k = 0; k < P; ++k) {
      const NoiseSpec noise = NoiseSpec::from_exponent(config.p_list[k]);
      std::optional<double> rate;
      if (config.measure != MeasureChoice::kNone) {
        const auto model = measure_model(config, policy.seed_for(StreamRole::kMeasure, 0, zi));
        rate = local_measure(model, z, noise.epsilon, map).value / noise.epsilon;
      }
      for (std::size_t j = 0; j < M; ++j) {
        const std::int64_t m = config.m_list[j];
        std::vector<HittingTimeSample> samples(L);
        for (std::size_t l = 0; l < L; ++l) {
          HittingTimeSample& s = samples[l];
          s.z = z;
          s.radius = config.t_grid[l] / static_cast<double>(m);
          s.epsilon = noise.epsilon;
          s.map = map.kind();
          s.max_steps = config.max_steps_factor * m;
          const std::size_t base = ((((zi * P + k) * M + j) * L) + l) * R;
          for (std::size_t r = 0; r < R; ++r) {
            if (times[base + r]) {
              s.times.push_back(*times[base + r]);
            } else {
              ++s.censored;
            }
          }
        }
        const auto curve = survival_curve(samples, m, config.t_grid, rate);
        for (std::size_t l = 0; l < L; ++l) {
          SurvivalRow row;
          row.p = config.p_list[k];
          row.m = m;
          row.t = curve[l].t;
          row.radius = samples[l].radius;
          row.empirical = curve[l].empirical;
          row.theoretical = curve[l].theoretical;
          row.realizations = samples[l].realizations();
          row.censored = samples[l].censored;
          out.push_back(row);
        }
      }
    }
  }
  return out;
}

ExperimentResult run_experiment(const ExperimentConfig& config, unsigned threads) {
  config.validate();
  ExperimentResult result;
  result.kind = config.kind;
  switch (config.kind) {
    case ExperimentKind::kTruncation:
      result.rows = run_truncation_experiment(config, threads);
      break;
    case ExperimentKind::kBmConvergence:
      result.rows = run_bm_convergence_experiment(config, threads);
      break;
    case ExperimentKind::kDimension:
      result = run_dimension_experiment(config, threads);
      break;
    case ExperimentKind::kHittingTime:
      result.survival = run_hitting_time_experiment(config, threads);
      break;
  }
  return result;
}

std::vector<DimensionSummary> summarize_dimension(std::span<const ResultRow> rows, int d,
                                                  double plateau_threshold) {
  // m -> p -> fitted locations
  std::map<std::int64_t, std::map<double, std::vector<double>>> grouped;
  for (const auto& row : rows) {
    if (!row.p) continue;
    auto& bucket = grouped[row.m][*row.p];
    if (row.fit) bucket.push_back(row.fit->mu);
  }

  std::vector<DimensionSummary> out;
  for (const auto& [m, by_p] : grouped) {
    DimensionSummary summary;
    summary.m = m;
    for (const auto& [p, mus] : by_p) {
      if (!mus.empty()) summary.scan.push_back({p, sample_mean(mus)});
    }
    try {
      summary.estimate = estimate_dimension(summary.scan, d, plateau_threshold);
    } catch (const Error& e) {
      summary.warning = e.what();
    }
    out.push_back(std::move(summary));
  }
  return out;
}

std::vector<CellSummary> aggregate(std::span<const ResultRow> rows) {
  std::map<std::size_t, std::vector<const ResultRow*>> cells;
  for (const auto& row : rows) cells[row.cell].push_back(&row);

  std::vector<CellSummary> out;
  out.reserve(cells.size());
  for (const auto& [cell, members] : cells) {
    const ResultRow& head = *members.front();
    CellSummary s;
    s.cell = cell;
    s.p = head.p;
    s.q = head.q;
    s.m = head.m;
    s.count = members.size();
    s.single_row = s.count == 1;
    const bool same_z = std::all_of(members.begin(), members.end(),
                                    [&](const ResultRow* r) { return r->z == head.z; });
    s.target = same_z ? format_point(head.z, head.dim) : "random";

    std::vector<double> kappa, mu, sigma, theory;
    for (const ResultRow* r : members) {
      if (r->fit) {
        kappa.push_back(r->fit->kappa);
        mu.push_back(r->fit->mu);
        sigma.push_back(r->fit->sigma);
      } else {
        ++s.failures;
      }
      if (r->bm_theory) theory.push_back(*r->bm_theory);
    }
    s.failure_fraction = static_cast<double>(s.failures) / static_cast<double>(s.count);
    if (!kappa.empty()) {
      s.kappa = moments(kappa);
      s.mu = moments(mu);
      s.sigma = moments(sigma);
    }
    if (!theory.empty()) s.bm_theory = sample_mean(theory);
    out.push_back(std::move(s));
  }
  return out;
}

void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& fn) {
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(std::max(1u, threads), std::max<std::size_t>(count, 1)));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        while (!failed.load()) {
          const std::size_t i = next.fetch_add(1);
          if (i >= count) return;
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
            failed = true;
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace evlnoise
