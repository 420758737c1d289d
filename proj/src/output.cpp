#include "evlnoise/output.hpp"

#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

namespace evlnoise {
namespace {

using nlohmann::ordered_json;

std::string opt(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

std::string z_field(const ResultRow& row) {
  if (row.dim == 1) return format_double(row.z.x);
  return format_double(row.z.x) + ";" + format_double(row.z.y);
}

ordered_json moments_json(const std::optional<MomentSummary>& m) {
  if (!m) return nullptr;
  return ordered_json{{"mean", m->mean}, {"std", m->stdev}};
}

template <typename T>
ordered_json opt_json(const std::optional<T>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

double parse_double(const std::string& field, const std::string& s) {
  std::istringstream in(s);
  in.imbue(std::locale::classic());
  double v = 0.0;
  in >> v;
  if (s.empty() || in.fail() || !in.eof()) {
    throw ConfigError(fmt::format("{}: cannot parse '{}'", field, s));
  }
  return v;
}

ordered_json scan_json(const std::vector<ScanPoint>& points) {
  ordered_json out = ordered_json::array();
  for (const auto& s : points) out.push_back({{"p", s.p}, {"b_m", s.b_m}});
  return out;
}

ordered_json dimension_to_json(const std::vector<DimensionSummary>& summaries) {
  ordered_json dims = ordered_json::array();
  for (const auto& d : summaries) {
    ordered_json est = nullptr;
    if (d.estimate) {
      est = ordered_json::object();
      est["dimension"] = d.estimate->dimension;
      est["slope"] = d.estimate->slope;
      est["intercept"] = d.estimate->intercept;
      est["std_error"] = d.estimate->std_error;
      est["points_used"] = scan_json(d.estimate->points_used);
      est["points_discarded"] = scan_json(d.estimate->points_discarded);
    }
    ordered_json item = ordered_json::object();
    item["m"] = d.m;
    item["scan"] = scan_json(d.scan);
    item["estimate"] = std::move(est);
    item["warning"] = d.warning.empty() ? ordered_json(nullptr) : ordered_json(d.warning);
    dims.push_back(std::move(item));
  }
  return dims;
}

}  // namespace

std::string dimension_json(const std::vector<DimensionSummary>& summaries) {
  return dimension_to_json(summaries).dump(2) + "\n";
}

std::string format_double(double v) { return fmt::format("{:.17g}", v); }

void write_rows_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << kRowsHeader << '\n';
  for (const auto& r : rows) {
    const std::optional<double> kappa = r.fit ? std::optional(r.fit->kappa) : std::nullopt;
    const std::optional<double> mu = r.fit ? std::optional(r.fit->mu) : std::nullopt;
    const std::optional<double> sigma = r.fit ? std::optional(r.fit->sigma) : std::nullopt;
    out << to_string(r.experiment) << ',' << r.map << ',' << z_field(r) << ',' << opt(r.p) << ','
        << (r.q ? std::to_string(*r.q) : std::string()) << ',' << r.m << ',' << r.realization
        << ',' << opt(kappa) << ',' << opt(mu) << ',' << opt(sigma) << ','
        << (r.converged() ? "true" : "false") << ',' << opt(r.bm_theory) << ',' << r.seed << '\n';
  }
}

void write_survival_csv(std::ostream& out, const std::vector<SurvivalRow>& rows) {
  out << "p,m,t,radius,empirical,theoretical,realizations,censored\n";
  for (const auto& r : rows) {
    out << format_double(r.p) << ',' << r.m << ',' << format_double(r.t) << ','
        << format_double(r.radius) << ',' << format_double(r.empirical) << ','
        << opt(r.theoretical) << ',' << r.realizations << ',' << r.censored << '\n';
  }
}

std::string summary_json(const ExperimentResult& result, const ExperimentConfig& config) {
  ordered_json j;
  j["experiment"] = std::string(to_string(result.kind));
  j["map"] = config.map_name;
  j["base_seed"] = config.base_seed;
  j["realizations"] = config.realizations;
  j["n_blocks"] = config.n_blocks;
  j["row_count"] = result.rows.size();

  ordered_json cells = ordered_json::array();
  for (const auto& c : aggregate(result.rows)) {
    cells.push_back({{"cell", c.cell},
                     {"target", c.target},
                     {"p", opt_json(c.p)},
                     {"q", opt_json(c.q)},
                     {"m", c.m},
                     {"count", c.count},
                     {"single_row", c.single_row},
                     {"failures", c.failures},
                     {"failure_fraction", c.failure_fraction},
                     {"kappa", moments_json(c.kappa)},
                     {"mu", moments_json(c.mu)},
                     {"sigma", moments_json(c.sigma)},
                     {"bm_theory", opt_json(c.bm_theory)}});
  }
  j["cells"] = std::move(cells);

  j["dimension"] = dimension_to_json(result.dimension);

  ordered_json surv = ordered_json::array();
  for (const auto& s : result.survival) {
    surv.push_back({{"p", s.p},
                    {"m", s.m},
                    {"t", s.t},
                    {"radius", s.radius},
                    {"empirical", s.empirical},
                    {"theoretical", opt_json(s.theoretical)},
                    {"realizations", s.realizations},
                    {"censored", s.censored}});
  }
  j["survival"] = std::move(surv);
  return j.dump(2) + "\n";
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw ConfigError("column: no column named '" + name + "'");
}

CsvTable read_csv(std::istream& in) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  bool any = false;
  char ch;
  auto end_record = [&] {
    record.push_back(std::move(field));
    field.clear();
    if (!(record.size() == 1 && record[0].empty())) records.push_back(std::move(record));
    record.clear();
    any = false;
  };
  while (in.get(ch)) {
    any = true;
    if (quoted) {
      if (ch == '"') {
        if (in.peek() == '"') {
          in.get(ch);
          field += '"';
        } else {
          quoted = false;
        }
      } else {
        field += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      record.push_back(std::move(field));
      field.clear();
    } else if (ch == '\n') {
      end_record();
    } else if (ch != '\r') {
      field += ch;
    }
  }
  if (quoted) throw ConfigError("csv: unterminated quoted field");
  if (any) end_record();
  if (records.empty()) throw ConfigError("csv: no header row");

  CsvTable t;
  t.header = std::move(records.front());
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].size() != t.header.size()) {
      throw ConfigError(fmt::format("csv: record {} has {} fields, header has {}", i + 1,
                                    records[i].size(), t.header.size()));
    }
    t.records.push_back(std::move(records[i]));
  }
  return t;
}

std::vector<ResultRow> rows_from_csv(const CsvTable& table) {
  const auto c_map = table.column("map");
  const auto c_p = table.column("p");
  const auto c_m = table.column("m");
  const auto c_mu = table.column("mu");
  const auto c_kappa = table.column("kappa");
  const auto c_sigma = table.column("sigma");
  const auto c_conv = table.column("converged");
  std::vector<ResultRow> rows;
  rows.reserve(table.records.size());
  for (const auto& rec : table.records) {
    ResultRow r;
    r.map = rec[c_map];
    r.dim = MapSystem::from_name(r.map).ambient_dim();
    if (!rec[c_p].empty()) r.p = parse_double("p", rec[c_p]);
    r.m = static_cast<std::int64_t>(parse_double("m", rec[c_m]));
    if (rec[c_conv] == "true") {
      r.fit = GevParams{parse_double("kappa", rec[c_kappa]), parse_double("mu", rec[c_mu]),
                        parse_double("sigma", rec[c_sigma])};
      r.status = FitStatus::kOk;
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace evlnoise
