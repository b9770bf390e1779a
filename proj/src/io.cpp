#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "curesem/io.hpp"
#include "json.hpp"

namespace curesem {

namespace {

using nlohmann::json;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string fmt_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_double(const std::string& tok, const std::string& where) {
  const char* s = tok.c_str();
  char* end = nullptr;
  const double v = std::strtod(s, &end);
  if (end == s || *end != '\0')
    throw std::runtime_error(where + ": expected a number, got '" + tok + "'");
  return v;
}

std::vector<std::string> split(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == delim) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

json summary_rows_json(const std::vector<SummaryRow>& rows) {
  json arr = json::array();
  for (const auto& row : rows)
    arr.push_back({{"parameter", row.name},
                   {"truth", row.truth},
                   {"estimate", row.mean},
                   {"mean_se", row.mean_se},
                   {"bias", row.bias},
                   {"rmse", row.rmse},
                   {"cp", row.cp},
                   {"cp_denom", row.cp_denom}});
  return arr;
}

void summary_tsv(std::ostringstream& os, const std::vector<SummaryRow>& rows) {
  os << "parameter\ttruth\testimate\tmean_se\tbias\trmse\tcp\n";
  for (const auto& row : rows)
    os << row.name << '\t' << fmt(row.truth) << '\t' << fmt(row.mean) << '\t'
       << fmt(row.mean_se) << '\t' << fmt(row.bias) << '\t' << fmt(row.rmse)
       << '\t' << fmt(row.cp) << '\n';
}

}  // namespace

DatasetFile load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open");
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const char delim = line.find('\t') != std::string::npos ? '\t' : ',';
  const auto header = split(line, delim);

  int time_col = -1, status_col = -1;
  std::vector<std::pair<int, bool>> cov_cols;  // (column, is_x)
  DatasetFile df;
  for (size_t c = 0; c < header.size(); ++c) {
    const std::string& name = header[c];
    if (name == "time") {
      time_col = static_cast<int>(c);
    } else if (name == "status") {
      status_col = static_cast<int>(c);
    } else if (name.rfind("x_", 0) == 0) {
      cov_cols.emplace_back(static_cast<int>(c), true);
      df.x_names.push_back(name);
    } else if (name.rfind("z_", 0) == 0) {
      cov_cols.emplace_back(static_cast<int>(c), false);
      df.z_names.push_back(name);
    } else {
      throw std::runtime_error(path + ":1: unknown column '" + name +
                               "' (expected time, status, x_*, z_*)");
    }
  }
  if (time_col < 0) throw std::runtime_error(path + ":1: missing column 'time'");
  if (status_col < 0) throw std::runtime_error(path + ":1: missing column 'status'");

  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      if (in.peek() == std::ifstream::traits_type::eof()) break;
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": blank line");
    }
    const auto tok = split(line, delim);
    const std::string where = path + ":" + std::to_string(lineno);
    if (tok.size() != header.size())
      throw std::runtime_error(where + ": expected " + std::to_string(header.size()) +
                               " fields, got " + std::to_string(tok.size()));
    Observation obs;
    obs.t = parse_double(tok[time_col], where + " (time)");
    if (!(obs.t > 0) || !std::isfinite(obs.t))
      throw std::runtime_error(where + ": time must be positive");
    const double st = parse_double(tok[status_col], where + " (status)");
    if (st != 0.0 && st != 1.0)
      throw std::runtime_error(where + ": status must be 0 or 1");
    obs.delta = static_cast<int>(st);
    obs.cov.x.push_back(1.0);
    obs.cov.z.push_back(1.0);
    for (const auto& [c, is_x] : cov_cols) {
      const double v = parse_double(tok[c], where + " (" + header[c] + ")");
      if (!std::isfinite(v))
        throw std::runtime_error(where + ": non-finite value in " + header[c]);
      (is_x ? obs.cov.x : obs.cov.z).push_back(v);
    }
    df.obs.push_back(std::move(obs));
  }
  if (df.obs.empty()) throw std::runtime_error(path + ": no data rows");
  return df;
}

void save_dataset(const DatasetFile& df, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << "time,status";
  for (const auto& name : df.x_names) out << ',' << name;
  for (const auto& name : df.z_names) out << ',' << name;
  out << '\n';
  for (const auto& obs : df.obs) {
    if (obs.cov.x.size() != df.x_names.size() + 1 ||
        obs.cov.z.size() != df.z_names.size() + 1)
      throw std::runtime_error(path + ": covariate width does not match names");
    out << fmt_full(obs.t) << ',' << obs.delta;
    for (size_t k = 1; k < obs.cov.x.size(); ++k) out << ',' << fmt_full(obs.cov.x[k]);
    for (size_t k = 1; k < obs.cov.z.size(); ++k) out << ',' << fmt_full(obs.cov.z[k]);
    out << '\n';
  }
  if (!out) throw std::runtime_error(path + ": write failed");
}

std::vector<double> parse_phi_grid(const std::string& text) {
  const auto tok = split(text, ':');
  if (tok.size() != 3)
    throw std::invalid_argument("phi grid must be lo:hi:step, got '" + text + "'");
  double lo, hi, step;
  try {
    lo = parse_double(tok[0], "phi grid lo");
    hi = parse_double(tok[1], "phi grid hi");
    step = parse_double(tok[2], "phi grid step");
  } catch (const std::runtime_error& e) {
    throw std::invalid_argument(e.what());
  }
  if (!(lo > 0) || !(step > 0) || hi < lo)
    throw std::invalid_argument("phi grid needs 0 < lo <= hi and step > 0");
  std::vector<double> grid;
  for (int k = 0;; ++k) {
    const double v = lo + k * step;
    if (v > hi + step * 1e-9) break;
    grid.push_back(v);
  }
  return grid;
}

Scenario scenario_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw std::invalid_argument(std::string("scenario: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("scenario: expected a JSON object");
  static const std::vector<std::string> known{
      "n",          "groups",      "cure-targets", "censor-targets", "phi-true",
      "gamma1-true", "alpha0-true", "alpha1-true",  "replicates",     "seed"};
  for (const auto& [key, unused] : j.items()) {
    (void)unused;
    bool ok = false;
    for (const auto& k : known) ok = ok || k == key;
    if (!ok) throw std::invalid_argument("scenario: unknown field '" + key + "'");
  }
  Scenario s;
  try {
    s.n = j.value("n", s.n);
    s.groups = j.value("groups", s.groups);
    if (j.contains("cure-targets")) {
      const auto& ct = j.at("cure-targets");
      if (!ct.is_array() || ct.size() != 2)
        throw std::invalid_argument("scenario: cure-targets must be [p0_first, p0_last]");
      s.p0_first = ct[0].get<double>();
      s.p0_last = ct[1].get<double>();
    }
    if (j.contains("censor-targets"))
      s.censor_targets = j.at("censor-targets").get<std::vector<double>>();
    s.phi = j.value("phi-true", s.phi);
    s.gamma1 = j.value("gamma1-true", s.gamma1);
    s.alpha = {j.value("alpha0-true", s.alpha[0]), j.value("alpha1-true", s.alpha[1])};
    s.replicates = j.value("replicates", s.replicates);
    s.seed = j.value("seed", s.seed);
  } catch (const std::invalid_argument&) {
    throw;
  } catch (const std::exception& e) {
    throw std::invalid_argument(std::string("scenario: ") + e.what());
  }
  return s;
}

std::string scenario_to_json(const Scenario& s) {
  json j{{"n", s.n},
         {"groups", s.groups},
         {"cure-targets", {s.p0_first, s.p0_last}},
         {"censor-targets", s.censor_targets},
         {"phi-true", s.phi},
         {"gamma1-true", s.gamma1},
         {"alpha0-true", s.alpha[0]},
         {"alpha1-true", s.alpha[1]},
         {"replicates", s.replicates},
         {"seed", s.seed}};
  return j.dump(2) + "\n";
}

std::string study_params_tsv(const StudyResult& r, const AlgoStudy& a) {
  std::ostringstream os;
  os << "# algorithm: " << a.algorithm << "\n";
  os << "# replicates: " << r.scenario.replicates << "\tfailures: " << a.failures
     << "\tseed: " << r.scenario.seed << "\n";
  summary_tsv(os, a.params);
  return os.str();
}

std::string study_cure_tsv(const StudyResult& r, const AlgoStudy& a) {
  std::ostringstream os;
  os << "# algorithm: " << a.algorithm << "\n";
  os << "# replicates: " << r.scenario.replicates << "\tfailures: " << a.failures
     << "\tseed: " << r.scenario.seed << "\n";
  summary_tsv(os, a.cure);
  return os.str();
}

std::string study_cpu_tsv(const StudyResult& r) {
  std::ostringstream os;
  os << "algorithm\treplicates\tfailures\tcpu_seconds\n";
  for (const auto& a : r.algos)
    os << a.algorithm << '\t' << r.scenario.replicates << '\t' << a.failures << '\t'
       << fmt_full(a.cpu_seconds) << '\n';
  return os.str();
}

std::string study_raw_json(const StudyResult& r) {
  json j;
  j["schema"] = 1;
  j["scenario"] = json::parse(scenario_to_json(r.scenario));
  j["truth"] = {{"names", r.truth.names()}, {"values", r.truth.flatten()}};
  j["censoring-rates"] = r.xi;
  j["algorithms"] = json::array();
  for (const auto& a : r.algos) {
    json ja{{"algorithm", a.algorithm},
            {"failures", a.failures},
            {"cpu_seconds", a.cpu_seconds},
            {"params", summary_rows_json(a.params)},
            {"cure", summary_rows_json(a.cure)}};
    json recs = json::array();
    for (const auto& rec : a.records) {
      json jr{{"rep", rec.rep},       {"ok", rec.ok},
              {"estimate", rec.estimate}, {"se", rec.se},
              {"loglik", rec.loglik}, {"seconds", rec.seconds},
              {"covered", rec.covered}};
      if (!rec.ok) jr["error"] = rec.error;
      json jc = json::array();
      for (const auto& ce : rec.cure)
        jc.push_back({{"z", ce.z},
                      {"estimate", ce.estimate},
                      {"se", ce.se},
                      {"ci95", {ce.ci95.first, ce.ci95.second}}});
      jr["cure"] = jc;
      recs.push_back(std::move(jr));
    }
    ja["records"] = std::move(recs);
    j["algorithms"].push_back(std::move(ja));
  }
  return j.dump(2) + "\n";
}

}  // namespace curesem
