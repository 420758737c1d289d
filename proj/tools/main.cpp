#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "evlnoise/config.hpp"
#include "evlnoise/output.hpp"

#ifndef EVLNOISE_VERSION
#define EVLNOISE_VERSION "unknown"
#endif

namespace fs = std::filesystem;
using namespace evlnoise;

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

// A manifest is accepted wherever a config is, so a run can be replayed from it.
ConfigFile load_config_or_manifest(const std::string& path) {
  const std::string text = read_file(path);
  if (fs::path(path).extension() != ".json") return parse_config(text);
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("manifest: ") + e.what());
  }
  if (!manifest.contains("config") || !manifest["config"].is_string()) {
    throw ConfigError("manifest: missing config text");
  }
  ConfigFile cfg = parse_config(manifest["config"].get<std::string>());
  if (manifest.contains("base_seed")) cfg.config.base_seed = manifest["base_seed"].get<std::uint64_t>();
  return cfg;
}

int cmd_run(const std::string& path, std::optional<std::uint64_t> seed,
            std::optional<std::string> out_dir, unsigned threads) {
  ConfigFile cfg = load_config_or_manifest(path);
  if (seed) cfg.config.base_seed = *seed;
  const fs::path dir = out_dir ? fs::path(*out_dir) : fs::path(cfg.output_dir);

  const auto start = std::chrono::steady_clock::now();
  const ExperimentResult result = run_experiment(cfg.config, threads);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  fs::create_directories(dir);
  std::ostringstream rows;
  write_rows_csv(rows, result.rows);
  write_file(dir / "rows.csv", rows.str());
  if (result.kind == ExperimentKind::kHittingTime) {
    std::ostringstream surv;
    write_survival_csv(surv, result.survival);
    write_file(dir / "survival.csv", surv.str());
  }
  write_file(dir / "summary.json", summary_json(result, cfg.config));

  nlohmann::ordered_json manifest;
  manifest["version"] = EVLNOISE_VERSION;
  manifest["base_seed"] = cfg.config.base_seed;
  manifest["wall_time_seconds"] = wall;
  manifest["config"] = cfg.text;
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");

  for (const auto& d : result.dimension) {
    if (!d.warning.empty()) std::cerr << "warning: m=" << d.m << ": " << d.warning << '\n';
  }
  std::cout << fmt::format("{} rows written to {}\n", result.rows.size(), dir.string());
  return 0;
}

int cmd_validate(const std::string& path) {
  const ConfigFile cfg = load_config_or_manifest(path);
  std::cout << "ok: " << to_string(cfg.config.kind) << " on " << cfg.config.map_name << '\n';
  return 0;
}

int cmd_fit(const std::string& path, const std::string& column, std::int64_t m,
            const GevFitOptions& options) {
  if (m < 1) throw ConfigError("m: must be >= 1");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  const CsvTable table = read_csv(in);
  const std::size_t col = table.column(column);
  std::vector<double> series;
  series.reserve(table.records.size());
  for (const auto& rec : table.records) {
    std::istringstream field(rec[col]);
    field.imbue(std::locale::classic());
    double v = 0.0;
    field >> v;
    if (rec[col].empty() || field.fail() || !field.eof()) {
      throw ConfigError(fmt::format("{}: cannot parse '{}'", column, rec[col]));
    }
    series.push_back(v);
  }
  const auto maxima = block_maxima(series, static_cast<std::size_t>(m));
  const GevFit fit = fit_gev(maxima, options);

  nlohmann::ordered_json j;
  j["column"] = column;
  j["m"] = m;
  j["n_blocks"] = maxima.size();
  j["status"] = std::string(to_string(fit.status));
  j["converged"] = fit.converged;
  if (fit.converged) {
    j["kappa"] = fit.params.kappa;
    j["mu"] = fit.params.mu;
    j["sigma"] = fit.params.sigma;
  }
  j["t3"] = fit.t3;
  std::cout << j.dump(2) << '\n';
  return fit.converged ? 0 : kExitRuntime;
}

int cmd_dimension(const std::string& path, double threshold) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  const auto rows = rows_from_csv(read_csv(in));
  if (rows.empty()) throw ConfigError("rows: file holds no rows");
  const int d = rows.front().dim;
  ExperimentResult result;
  result.kind = ExperimentKind::kDimension;
  result.dimension = summarize_dimension(rows, d, threshold);

  std::cout << dimension_json(result.dimension);
  const bool any = std::any_of(result.dimension.begin(), result.dimension.end(),
                               [](const DimensionSummary& s) { return s.estimate.has_value(); });
  return any ? 0 : kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Extreme value laws of noisy and truncated chaotic orbits"};
  app.require_subcommand(1);
  app.set_version_flag("--version", EVLNOISE_VERSION);

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  unsigned threads = hw;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::string path;

  auto* run = app.add_subcommand("run", "Run the experiment described by a config or manifest");
  run->add_option("config", path, "Config file (or manifest.json of an earlier run)")->required();
  run->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  run->add_option("--seed", seed, "Override the base seed");
  run->add_option("--out", out_dir, "Output directory");

  auto* validate = app.add_subcommand("validate", "Check a config without running it");
  validate->add_option("config", path, "Config file")->required();

  std::string column;
  std::int64_t m = 0;
  GevFitOptions fit_options;
  auto* fit = app.add_subcommand("fit", "Block-maxima GEV fit of one CSV column");
  fit->add_option("csv", path, "Input CSV with a header row")->required();
  fit->add_option("--column", column, "Column holding the series")->required();
  fit->add_option("--m", m, "Block length")->required();
  fit->add_option("--min-sample", fit_options.min_sample, "Smallest number of maxima to fit");
  fit->add_option("--t3-max", fit_options.t3_max, "Largest accepted |t3|");

  double threshold = 0.25;
  auto* dimension = app.add_subcommand("dimension", "Re-run the dimension regression on rows.csv");
  dimension->add_option("rows", path, "rows.csv of a dimension run")->required();
  dimension->add_option("--plateau-threshold", threshold, "Plateau slope fraction");

  auto* list_maps = app.add_subcommand("list-maps", "Print the catalog of maps");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) return cmd_run(path, seed, out_dir, threads);
    if (*validate) return cmd_validate(path);
    if (*fit) return cmd_fit(path, column, m, fit_options);
    if (*dimension) return cmd_dimension(path, threshold);
    if (*list_maps) {
      for (auto name : MapSystem::catalog_names()) std::cout << name << '\n';
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitRuntime;
}
