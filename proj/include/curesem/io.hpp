#pragma once

#include <string>
#include <vector>

#include "curesem/simulation.hpp"

namespace curesem {

// On-disk dataset: delimited text (comma or tab, sniffed), header row with
// `time`, `status` and covariate columns prefixed `x_` / `z_`. Loaders
// prepend the intercept column; names exclude it.
struct DatasetFile {
  Dataset obs;
  std::vector<std::string> x_names;
  std::vector<std::string> z_names;
};

DatasetFile load_dataset(const std::string& path);   // throws std::runtime_error, line-numbered
void save_dataset(const DatasetFile& df, const std::string& path);

// `lo:hi:step` inclusive grid, e.g. "0.1:10:0.1"
std::vector<double> parse_phi_grid(const std::string& text);

Scenario scenario_from_json(const std::string& text);
std::string scenario_to_json(const Scenario& s);

// study tables (TSV) and the raw per-replicate record blob (JSON)
std::string study_params_tsv(const StudyResult& r, const AlgoStudy& a);
std::string study_cure_tsv(const StudyResult& r, const AlgoStudy& a);
std::string study_cpu_tsv(const StudyResult& r);
std::string study_raw_json(const StudyResult& r);

}  // namespace curesem
