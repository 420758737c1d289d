#include "evlnoise/config.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

namespace evlnoise {
namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"experiment", {"kind", "realizations", "n_blocks", "base_seed", "m_list", "p_list",
                      "q_list", "z", "burn_in", "max_orbit_length"}},
      {"map", {"name", "alpha", "a", "b", "q1"}},
      {"measure", {"model", "empirical_length", "reference_dimension"}},
      {"fit", {"min_sample", "t3_max"}},
      {"dimension", {"plateau_threshold"}},
      {"hitting", {"t_grid", "max_steps_factor"}},
      {"output", {"dir"}},
  };
  return keys;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  if (trim(s).empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? s.npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <typename T>
T parse_number(const std::string& field, const std::string& text) {
  T value{};
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw ConfigError(fmt::format("{}: cannot parse '{}'", field, text));
  }
  return value;
}

// from_chars for double is missing in older libstdc++.
template <>
double parse_number<double>(const std::string& field, const std::string& text) {
  std::istringstream in(text);
  in.imbue(std::locale::classic());
  double value = 0.0;
  in >> value;
  if (text.empty() || in.fail() || !in.eof()) {
    throw ConfigError(fmt::format("{}: cannot parse '{}'", field, text));
  }
  return value;
}

template <typename T>
std::vector<T> parse_list(const std::string& field, const std::string& text) {
  std::vector<T> out;
  for (const auto& item : split(text, ',')) out.push_back(parse_number<T>(field, item));
  return out;
}

std::size_t parse_count(const std::string& field, const std::string& text) {
  if (!text.empty() && text.front() == '-') throw ConfigError(field + ": must be >= 0");
  return parse_number<std::size_t>(field, text);
}

TargetSpec parse_target(const std::string& text) {
  if (text == "attractor_random") return {TargetSpec::Kind::kAttractorRandom, {}};
  if (text == "sporadic") return {TargetSpec::Kind::kSporadic, {}};
  if (text == "recurrent") return {TargetSpec::Kind::kRecurrent, {}};
  const auto coords = split(text, ';');
  if (coords.size() == 1) return TargetSpec::literal({parse_number<double>("z", coords[0]), 0.0});
  if (coords.size() == 2) {
    return TargetSpec::literal(
        {parse_number<double>("z", coords[0]), parse_number<double>("z", coords[1])});
  }
  throw ConfigError("z: expected a selector, x, or x;y but got '" + text + "'");
}

MeasureChoice parse_measure(const std::string& text) {
  for (auto m : {MeasureChoice::kNone, MeasureChoice::kLebesgue, MeasureChoice::kHemmer,
                 MeasureChoice::kPM, MeasureChoice::kEmpirical}) {
    if (text == to_string(m)) return m;
  }
  throw ConfigError("measure.model: unknown model '" + text + "'");
}

}  // namespace

ConfigFile parse_config(std::string_view text) {
  pt::ptree tree;
  try {
    std::istringstream in{std::string(text)};
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(fmt::format("config: line {}: {}", e.line(), e.message()));
  }

  std::map<std::string, std::string> values;  // "section.key" -> value
  for (const auto& [section, body] : tree) {
    const auto it = known_keys().find(section);
    if (it == known_keys().end() || body.empty()) {
      throw ConfigError(section + ": unknown section");
    }
    for (const auto& [key, node] : body) {
      if (!it->second.count(key)) throw ConfigError(section + "." + key + ": unknown key");
      values[section + "." + key] = trim(node.data());
    }
  }
  auto get = [&](const std::string& k) -> std::optional<std::string> {
    auto it = values.find(k);
    if (it == values.end() || it->second.empty()) return std::nullopt;
    return it->second;
  };

  ConfigFile out;
  out.text = std::string(text);
  ExperimentConfig& c = out.config;

  const auto kind = get("experiment.kind");
  if (!kind) throw ConfigError("experiment.kind: required");
  c.kind = parse_experiment_kind(*kind);
  if (c.kind == ExperimentKind::kTruncation) c.m_list = {300, 1000, 3000};

  if (auto v = get("experiment.realizations")) c.realizations = parse_count("realizations", *v);
  if (auto v = get("experiment.n_blocks")) c.n_blocks = parse_count("n_blocks", *v);
  if (auto v = get("experiment.base_seed")) c.base_seed = parse_number<std::uint64_t>("base_seed", *v);
  if (auto v = get("experiment.m_list")) c.m_list = parse_list<std::int64_t>("m_list", *v);
  if (auto v = get("experiment.p_list")) c.p_list = parse_list<double>("p_list", *v);
  if (auto v = get("experiment.q_list")) c.q_list = parse_list<int>("q_list", *v);
  if (auto v = get("experiment.burn_in")) c.burn_in = parse_count("burn_in", *v);
  if (auto v = get("experiment.max_orbit_length")) {
    c.max_orbit_length = parse_count("max_orbit_length", *v);
  }
  if (auto v = get("experiment.z")) {
    c.targets.clear();
    for (const auto& item : split(*v, ',')) c.targets.push_back(parse_target(item));
  }

  if (auto v = get("map.name")) c.map_name = *v;
  if (auto v = get("map.alpha")) c.map_params.alpha = parse_number<double>("alpha", *v);
  if (auto v = get("map.a")) c.map_params.a = parse_number<double>("a", *v);
  if (auto v = get("map.b")) c.map_params.b = parse_number<double>("b", *v);
  if (auto v = get("map.q1")) c.map_params.q1 = parse_number<double>("q1", *v);

  if (auto v = get("measure.model")) c.measure = parse_measure(*v);
  if (auto v = get("measure.empirical_length")) {
    c.empirical_length = parse_count("empirical_length", *v);
  }
  if (auto v = get("measure.reference_dimension")) {
    c.reference_dimension = parse_number<double>("reference_dimension", *v);
  }
  if (auto v = get("fit.min_sample")) c.fit.min_sample = parse_count("min_sample", *v);
  if (auto v = get("fit.t3_max")) c.fit.t3_max = parse_number<double>("t3_max", *v);
  if (auto v = get("dimension.plateau_threshold")) {
    c.plateau_threshold = parse_number<double>("plateau_threshold", *v);
  }
  if (auto v = get("hitting.t_grid")) c.t_grid = parse_list<double>("t_grid", *v);
  if (auto v = get("hitting.max_steps_factor")) {
    c.max_steps_factor = parse_number<std::int64_t>("max_steps_factor", *v);
  }
  if (auto v = get("output.dir")) out.output_dir = *v;

  c.validate();
  return out;
}

ConfigFile load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace evlnoise
