#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "curesem/curesem.h"
#include "json.hpp"

namespace {

using nlohmann::json;

int diagnostic(int code, const std::string& message) {
  json j{{"schema", 1}, {"error", {{"code", code}, {"message", message}}}};
  std::cout << j.dump(2) << "\n";
  return code;
}

int api_failure(int rc) { return diagnostic(rc, curesem_last_error()); }

bool read_file(const std::string& path, std::string& out, std::string& err) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    err = path + ": cannot open";
    return false;
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  out = ss.str();
  return true;
}

bool write_file(const std::string& path, const std::string& content,
                std::string& err) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) {
    err = path + ": write failed";
    return false;
  }
  return true;
}

// explicit --seed wins over the CURESEM_SEED environment override
bool resolve_seed(bool seed_given, uint64_t seed, json& cfg, std::string& err) {
  if (seed_given) {
    cfg["seed"] = seed;
    return true;
  }
  const char* env = std::getenv("CURESEM_SEED");
  if (env == nullptr || *env == '\0') return true;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (end == env || *end != '\0') {
    err = std::string("CURESEM_SEED is not an unsigned integer: '") + env + "'";
    return false;
  }
  cfg["seed"] = static_cast<uint64_t>(v);
  return true;
}

bool parse_cure_profile(const std::string& text, std::vector<double>& out,
                        std::string& err) {
  if (text.rfind("z=", 0) != 0) {
    err = "cure profile must look like z=1,2 (got '" + text + "')";
    return false;
  }
  std::stringstream ss(text.substr(2));
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      err = "cure profile has a non-numeric entry: '" + tok + "'";
      return false;
    }
  }
  if (out.empty()) {
    err = "cure profile is empty";
    return false;
  }
  return true;
}

struct Results {
  curesem_dataset* data = nullptr;
  curesem_result* result = nullptr;
  ~Results() {
    curesem_dataset_free(data);
    curesem_result_free(result);
  }
};

int write_result_files(const curesem_result* result, const std::string& prefix) {
  json doc;
  try {
    doc = json::parse(curesem_result_json(result));
  } catch (const std::exception& e) {
    return diagnostic(CURESEM_NUMERIC_ERROR, std::string("bad result: ") + e.what());
  }
  for (const auto& f : doc.at("files")) {
    const std::string path = prefix + f.at("suffix").get<std::string>();
    std::string err;
    if (!write_file(path, f.at("content").get<std::string>(), err))
      return diagnostic(CURESEM_NUMERIC_ERROR, err);
    std::cout << path << "\n";
  }
  return CURESEM_OK;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Negative-binomial competing-risks cure-rate model estimation"};
  app.require_subcommand(1);

  // fit
  auto* fit = app.add_subcommand("fit", "Fit the model to a dataset");
  std::string fit_data, fit_algo, fit_rule, fit_grid, fit_init = "auto", fit_out;
  int fit_iters = 0, fit_burnin = 0, fit_mc = 0;
  double fit_eps = 0;
  uint64_t fit_seed = 0;
  std::vector<std::string> fit_profiles;
  fit->add_option("--data", fit_data, "Dataset CSV/TSV path")->required();
  fit->add_option("--algo", fit_algo, "Algorithm: sem, em, dm, mcem")->required();
  auto* o_iters = fit->add_option("--iters", fit_iters, "Iteration budget");
  auto* o_burnin = fit->add_option("--burnin", fit_burnin, "SEM burn-in");
  auto* o_rule = fit->add_option("--mle-rule", fit_rule, "SEM rule: mean, max-loglik");
  auto* o_grid = fit->add_option("--phi-grid", fit_grid, "EM grid lo:hi:step");
  auto* o_seed = fit->add_option("--seed", fit_seed, "RNG seed");
  auto* o_eps = fit->add_option("--eps", fit_eps, "Convergence tolerance");
  auto* o_mc = fit->add_option("--mc-samples", fit_mc, "MCEM draws per iteration");
  fit->add_option("--init", fit_init, "\"auto\" or a JSON parameter file");
  fit->add_option("--cure-profile", fit_profiles, "Cure profile z=... (repeatable)");
  fit->add_option("--out", fit_out, "Write the FitReport here instead of stdout");

  // simulate
  auto* sim = app.add_subcommand("simulate", "Run a Monte Carlo study");
  std::string sim_scenario, sim_algos = "sem", sim_prefix;
  int sim_reps = 0, sim_jobs = 1;
  uint64_t sim_seed = 0;
  sim->add_option("--scenario", sim_scenario, "Scenario JSON path")->required();
  sim->add_option("--algos", sim_algos, "Comma-separated: sem,em,dm,mcem");
  sim->add_option("--replicates", sim_reps, "Override scenario replicates");
  sim->add_option("--jobs", sim_jobs, "Parallel replicate workers");
  auto* o_sim_seed = sim->add_option("--seed", sim_seed, "Override scenario seed");
  sim->add_option("--out-prefix", sim_prefix, "Output file prefix")->required();

  // diagnose
  auto* dia = app.add_subcommand("diagnose", "Model diagnostics for a fit");
  std::string dia_fit, dia_data, dia_prefix;
  dia->add_option("--fit", dia_fit, "FitReport JSON path")->required();
  dia->add_option("--data", dia_data, "Dataset CSV/TSV path")->required();
  dia->add_option("--out-prefix", dia_prefix, "Output file prefix")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return CURESEM_USAGE_ERROR;
  }

  std::string err;

  if (fit->parsed()) {
    json cfg{{"algo", fit_algo}};
    if (o_iters->count()) cfg["iters"] = fit_iters;
    if (o_burnin->count()) cfg["burnin"] = fit_burnin;
    if (o_rule->count()) cfg["mle-rule"] = fit_rule;
    if (o_grid->count()) cfg["phi-grid"] = fit_grid;
    if (o_eps->count()) cfg["eps"] = fit_eps;
    if (o_mc->count()) cfg["mc-samples"] = fit_mc;
    if (!resolve_seed(o_seed->count() > 0, fit_seed, cfg, err))
      return diagnostic(CURESEM_USAGE_ERROR, err);
    if (fit_init == "auto") {
      cfg["init"] = "auto";
    } else {
      std::string text;
      if (!read_file(fit_init, text, err)) return diagnostic(CURESEM_USAGE_ERROR, err);
      try {
        cfg["init"] = json::parse(text);
      } catch (const std::exception& e) {
        return diagnostic(CURESEM_USAGE_ERROR, fit_init + ": " + e.what());
      }
    }
    if (!fit_profiles.empty()) {
      json arr = json::array();
      for (const auto& text : fit_profiles) {
        std::vector<double> z;
        if (!parse_cure_profile(text, z, err))
          return diagnostic(CURESEM_USAGE_ERROR, err);
        arr.push_back(z);
      }
      cfg["cure-profiles"] = arr;
    }
    Results r;
    int rc = curesem_dataset_load(fit_data.c_str(), &r.data);
    if (rc != CURESEM_OK) return api_failure(rc);
    rc = curesem_fit(r.data, cfg.dump().c_str(), &r.result);
    if (rc != CURESEM_OK) return api_failure(rc);
    const std::string report = curesem_result_json(r.result);
    if (fit_out.empty()) {
      std::cout << report;
    } else if (!write_file(fit_out, report, err)) {
      return diagnostic(CURESEM_NUMERIC_ERROR, err);
    }
    return CURESEM_OK;
  }

  if (sim->parsed()) {
    std::string scenario;
    if (!read_file(sim_scenario, scenario, err))
      return diagnostic(CURESEM_USAGE_ERROR, err);
    json cfg = json::object();
    {
      json algos = json::array();
      std::stringstream ss(sim_algos);
      std::string tok;
      while (std::getline(ss, tok, ','))
        if (!tok.empty()) algos.push_back(tok);
      cfg["algos"] = algos;
    }
    if (sim_reps > 0) cfg["replicates"] = sim_reps;
    cfg["jobs"] = sim_jobs;
    if (!resolve_seed(o_sim_seed->count() > 0, sim_seed, cfg, err))
      return diagnostic(CURESEM_USAGE_ERROR, err);
    Results r;
    const int rc = curesem_simulate(scenario.c_str(), cfg.dump().c_str(), &r.result);
    if (rc != CURESEM_OK) return api_failure(rc);
    return write_result_files(r.result, sim_prefix);
  }

  // diagnose
  std::string fit_json;
  if (!read_file(dia_fit, fit_json, err)) return diagnostic(CURESEM_USAGE_ERROR, err);
  json cfg = json::object();
  if (!resolve_seed(false, 0, cfg, err)) return diagnostic(CURESEM_USAGE_ERROR, err);
  Results r;
  int rc = curesem_dataset_load(dia_data.c_str(), &r.data);
  if (rc != CURESEM_OK) return api_failure(rc);
  rc = curesem_diagnose(r.data, fit_json.c_str(), cfg.dump().c_str(), &r.result);
  if (rc != CURESEM_OK) return api_failure(rc);
  return write_result_files(r.result, dia_prefix);
}
