#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "evlnoise/dynamics.hpp"
#include "evlnoise/evt.hpp"
#include "evlnoise/measure.hpp"
#include "evlnoise/perturbation.hpp"

namespace evlnoise {

enum class ExperimentKind { kTruncation, kBmConvergence, kDimension, kHittingTime };

std::string_view to_string(ExperimentKind kind);
ExperimentKind parse_experiment_kind(std::string_view text);

/// Where the target point z comes from.
struct TargetSpec {
  enum class Kind { kLiteral, kAttractorRandom, kSporadic, kRecurrent };
  Kind kind = Kind::kAttractorRandom;
  Point point;  // literal only

  static TargetSpec literal(Point p) { return {Kind::kLiteral, p}; }
  std::string label() const;
};

enum class MeasureChoice { kNone, kLebesgue, kHemmer, kPM, kEmpirical };

std::string_view to_string(MeasureChoice choice);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kBmConvergence;
  std::string map_name = "ternary_shift";
  MapParams map_params;
  std::vector<TargetSpec> targets{TargetSpec{}};
  std::vector<double> p_list;
  std::vector<int> q_list;
  std::vector<std::int64_t> m_list{1000, 10000, 30000};
  std::size_t n_blocks = 1000;
  std::size_t realizations = 30;
  std::uint64_t base_seed = 1;
  std::optional<std::size_t> burn_in;
  MeasureChoice measure = MeasureChoice::kNone;
  std::size_t empirical_length = 1'000'000;
  std::optional<double> reference_dimension;
  double plateau_threshold = 0.25;
  GevFitOptions fit;
  std::vector<double> t_grid{0.5, 1.0, 2.0, 4.0};
  std::int64_t max_steps_factor = 100;
  std::size_t max_orbit_length = 200'000'000;

  MapSystem map() const { return MapSystem::from_name(map_name, map_params); }

  /// Throws ConfigError whose message starts with the offending field name.
  void validate() const;
};

/// One (cell, realization) outcome. Failed fits keep `fit` empty.
struct ResultRow {
  ExperimentKind experiment = ExperimentKind::kBmConvergence;
  std::string map;
  Point z;
  int dim = 1;
  std::optional<double> p;
  std::optional<int> q;
  std::int64_t m = 0;
  std::size_t realization = 0;
  std::optional<GevParams> fit;
  FitStatus status = FitStatus::kFitDiverged;
  bool hit_target = false;  // a zero distance made the observable infinite
  std::optional<double> bm_theory;
  std::uint64_t seed = 0;
  std::size_t cell = 0;

  bool converged() const { return fit.has_value(); }
};

struct DimensionSummary {
  std::int64_t m = 0;
  std::vector<ScanPoint> scan;  // mean fitted b_m per p
  std::optional<DimensionEstimate> estimate;
  std::string warning;
};

struct SurvivalRow {
  double p = 0.0;
  std::int64_t m = 0;
  double t = 0.0;
  double radius = 0.0;
  double empirical = 0.0;
  std::optional<double> theoretical;
  std::size_t realizations = 0;
  std::size_t censored = 0;
};

struct ExperimentResult {
  ExperimentKind kind = ExperimentKind::kBmConvergence;
  std::vector<ResultRow> rows;
  std::vector<DimensionSummary> dimension;
  std::vector<SurvivalRow> survival;
};

/// Block maxima of -log||trunc(T^i x0 + eps xi_i, q) - z|| over n_blocks
/// consecutive blocks of length m, computed in one streaming pass. If an
/// observation lands exactly on z the run stops and `hit_target` is set.
struct MaximaRun {
  std::vector<double> maxima;
  bool hit_target = false;
};

MaximaRun noisy_block_maxima(const MapSystem& map, Point x0, Point z, std::size_t m,
                             std::size_t n_blocks, const NoiseSpec& noise,
                             const TruncationSpec& trunc, RandomStream* branch_rng,
                             RandomStream& noise_rng);

/// Resolves a target for one realization. Random targets are drawn from the
/// realization's own stream, so they are shared by every cell of it.
Point resolve_target(const TargetSpec& target, const MapSystem& map, std::uint64_t base_seed,
                     std::size_t realization, std::size_t target_index,
                     std::optional<std::size_t> burn_in = std::nullopt);

std::vector<ResultRow> run_truncation_experiment(const ExperimentConfig& config,
                                                 unsigned threads = 1);
std::vector<ResultRow> run_bm_convergence_experiment(const ExperimentConfig& config,
                                                     unsigned threads = 1);
ExperimentResult run_dimension_experiment(const ExperimentConfig& config, unsigned threads = 1);
std::vector<SurvivalRow> run_hitting_time_experiment(const ExperimentConfig& config,
                                                     unsigned threads = 1);

/// Dispatches on config.kind after validating it.
ExperimentResult run_experiment(const ExperimentConfig& config, unsigned threads = 1);

/// Per-m b_m scans (mean fitted location over converged rows) and their
/// dimension estimates. Regression failures become warnings.
std::vector<DimensionSummary> summarize_dimension(std::span<const ResultRow> rows, int d,
                                                  double plateau_threshold);

struct MomentSummary {
  double mean = 0.0;
  double stdev = 0.0;  // sample standard deviation, 0 for a single value
};

struct CellSummary {
  std::size_t cell = 0;
  std::string target;  // literal coordinates, or "random" when z varies
  std::optional<double> p;
  std::optional<int> q;
  std::int64_t m = 0;
  std::size_t count = 0;
  std::size_t failures = 0;
  double failure_fraction = 0.0;
  bool single_row = false;
  std::optional<MomentSummary> kappa;
  std::optional<MomentSummary> mu;
  std::optional<MomentSummary> sigma;
  std::optional<double> bm_theory;  // mean over rows carrying one
};

/// Groups rows by cell in ascending cell order.
std::vector<CellSummary> aggregate(std::span<const ResultRow> rows);

/// Runs fn(i) for i in [0, count) on up to `threads` workers. The first
/// exception thrown by any call is rethrown after all workers stop.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn);

}  // namespace evlnoise
