#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "evlnoise/experiments.hpp"

namespace evlnoise {

/// Fixed column order of the rows file.
inline constexpr const char* kRowsHeader =
    "experiment,map,z,p,q,m,realization,kappa,mu,sigma,converged,bm_theory,seed";

/// Round-trip exact decimal form (17 significant digits).
std::string format_double(double v);

void write_rows_csv(std::ostream& out, const std::vector<ResultRow>& rows);
void write_survival_csv(std::ostream& out, const std::vector<SurvivalRow>& rows);

/// Deterministic JSON summary: per-cell aggregates, dimension fits and the
/// survival table. Contains nothing that depends on timing or threads.
std::string summary_json(const ExperimentResult& result, const ExperimentConfig& config);

/// Per-m dimension scans and estimates as a JSON array.
std::string dimension_json(const std::vector<DimensionSummary>& summaries);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> records;

  /// Index of a header column; ConfigError if absent.
  std::size_t column(const std::string& name) const;
};

/// RFC 4180 reader: quoted fields, doubled quotes, CRLF or LF line ends.
CsvTable read_csv(std::istream& in);

/// Inverse of write_rows_csv for the columns the dimension regression needs.
std::vector<ResultRow> rows_from_csv(const CsvTable& table);

}  // namespace evlnoise
