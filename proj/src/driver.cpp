#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <set>
#include <sstream>

#include "curesem/diagnostics.hpp"
#include "curesem/estimators.hpp"
#include "driver.hpp"
#include "json.hpp"

namespace curesem::driver {

namespace {

using nlohmann::json;

json parse_config(const std::string& text, const char* what) {
  if (text.empty()) return json::object();
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw UsageError(std::string(what) + ": " + e.what());
  }
  if (!j.is_object()) throw UsageError(std::string(what) + ": expected a JSON object");
  return j;
}

void reject_unknown(const json& j, const std::set<std::string>& known,
                    const char* what) {
  for (const auto& [key, unused] : j.items()) {
    (void)unused;
    if (!known.count(key))
      throw UsageError(std::string(what) + ": unknown option '" + key + "'");
  }
}

template <typename T>
T get_as(const json& j, const std::string& key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const std::exception&) {
    throw UsageError("option '" + key + "' has the wrong type");
  }
}

uint64_t effective_seed(const json& cfg) {
  if (cfg.contains("seed")) return get_as<uint64_t>(cfg, "seed", kDefaultSeed);
  return kDefaultSeed;
}

json cure_to_json(const std::vector<CureEstimate>& cure) {
  json arr = json::array();
  for (const auto& ce : cure)
    arr.push_back({{"z", ce.z},
                   {"estimate", ce.estimate},
                   {"se", ce.se},
                   {"ci95", {ce.ci95.first, ce.ci95.second}}});
  return arr;
}

std::vector<CureEstimate> point_cure_estimates(
    const Params& p, const std::vector<std::vector<double>>& profiles) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<CureEstimate> out;
  for (const auto& z : profiles) {
    CureEstimate ce;
    ce.z = z;
    ce.estimate = cure_rate(p.phi, eta(z, p.beta));
    ce.se = nan;
    ce.ci95 = {nan, nan};
    out.push_back(ce);
  }
  return out;
}

Params default_init(size_t n_beta, size_t n_alpha) {
  Params p;
  p.phi = 1.0;
  p.beta.assign(n_beta, 0.0);
  p.alpha.assign(n_alpha, 0.0);
  p.gamma1 = 1.0;
  return p;
}

Params init_from_json(const json& j, size_t n_beta, size_t n_alpha) {
  static const std::set<std::string> known{"phi", "beta", "alpha", "gamma1"};
  reject_unknown(j, known, "init");
  Params p;
  p.phi = get_as<double>(j, "phi", 1.0);
  p.beta = get_as<std::vector<double>>(j, "beta", std::vector<double>(n_beta, 0.0));
  p.alpha = get_as<std::vector<double>>(j, "alpha", std::vector<double>(n_alpha, 0.0));
  p.gamma1 = get_as<double>(j, "gamma1", 1.0);
  if (p.beta.size() != n_beta)
    throw UsageError("init: beta must have " + std::to_string(n_beta) + " entries");
  if (p.alpha.size() != n_alpha)
    throw UsageError("init: alpha must have " + std::to_string(n_alpha) + " entries");
  if (!p.valid()) throw UsageError("init: invalid parameter values");
  return p;
}

// stratify on the first non-intercept cure covariate when present
int km_group_index(const DatasetFile& data) {
  return data.obs.front().cov.z.size() >= 2 ? 1 : -1;
}

}  // namespace

std::string run_fit(const DatasetFile& data, const std::string& config_json) {
  if (data.obs.empty()) throw UsageError("fit: empty dataset");
  const json cfg = parse_config(config_json, "fit config");
  static const std::set<std::string> known{
      "algo",  "iters", "burnin", "mle-rule",      "phi-grid", "seed",
      "eps",   "mc-samples", "init", "cure-profiles"};
  reject_unknown(cfg, known, "fit config");

  const std::string algo = get_as<std::string>(cfg, "algo", "");
  if (algo != "sem" && algo != "em" && algo != "dm" && algo != "mcem")
    throw UsageError("fit: --algo must be one of sem, em, dm, mcem (got '" + algo +
                     "')");
  if (cfg.contains("phi-grid") && algo != "em")
    throw UsageError("fit: --phi-grid only applies to --algo em");
  if ((cfg.contains("burnin") || cfg.contains("mle-rule")) && algo != "sem")
    throw UsageError("fit: --burnin/--mle-rule only apply to --algo sem");
  if (cfg.contains("mc-samples") && algo != "mcem")
    throw UsageError("fit: --mc-samples only applies to --algo mcem");

  const size_t n_beta = data.obs.front().cov.z.size();
  const size_t n_alpha = data.obs.front().cov.x.size();
  const uint64_t seed = effective_seed(cfg);

  // initialization
  Params init;
  std::vector<std::string> init_notes;
  const json init_spec = cfg.contains("init") ? cfg.at("init") : json("auto");
  if (init_spec.is_string() && init_spec.get<std::string>() == "auto") {
    try {
      init = initial_values(data.obs, kaplan_meier(data.obs, km_group_index(data)));
    } catch (const std::exception& e) {
      init = default_init(n_beta, n_alpha);
      init_notes.push_back(std::string("auto initialization unavailable (") + e.what() +
                           "); using the default start");
    }
  } else if (init_spec.is_object()) {
    init = init_from_json(init_spec, n_beta, n_alpha);
  } else {
    throw UsageError("fit: init must be \"auto\" or a parameter object");
  }

  // effective config echo assembled alongside the dispatch
  json echo{{"algo", algo}, {"x-names", data.x_names}, {"z-names", data.z_names}};
  FitResult fr;
  try {
    if (algo == "sem") {
      SemConfig sc;
      sc.iters = get_as<int>(cfg, "iters", sc.iters);
      sc.burnin = get_as<int>(cfg, "burnin", sc.burnin);
      const std::string rule = get_as<std::string>(cfg, "mle-rule", "max-loglik");
      if (rule == "mean")
        sc.rule = SemRule::Mean;
      else if (rule == "max-loglik")
        sc.rule = SemRule::MaxLoglik;
      else
        throw UsageError("fit: --mle-rule must be mean or max-loglik");
      sc.seed = seed;
      echo["iters"] = sc.iters;
      echo["burnin"] = sc.burnin;
      echo["mle-rule"] = rule;
      fr = fit_sem(data.obs, init, sc);
    } else if (algo == "em") {
      EmConfig ec;
      ec.phi_grid = parse_phi_grid(get_as<std::string>(cfg, "phi-grid", "0.1:10:0.1"));
      ec.max_iters = get_as<int>(cfg, "iters", ec.max_iters);
      ec.eps = get_as<double>(cfg, "eps", ec.eps);
      echo["phi-grid"] = get_as<std::string>(cfg, "phi-grid", "0.1:10:0.1");
      echo["iters"] = ec.max_iters;
      echo["eps"] = ec.eps;
      fr = fit_em(data.obs, init, ec);
    } else if (algo == "dm") {
      DmConfig dc;
      dc.opt.max_iters = get_as<int>(cfg, "iters", dc.opt.max_iters);
      echo["iters"] = dc.opt.max_iters;
      fr = fit_dm(data.obs, init, dc);
    } else {
      McemConfig mc;
      mc.mc_samples = get_as<int>(cfg, "mc-samples", mc.mc_samples);
      mc.max_iters = get_as<int>(cfg, "iters", mc.max_iters);
      mc.eps = get_as<double>(cfg, "eps", mc.eps);
      mc.seed = seed;
      echo["mc-samples"] = mc.mc_samples;
      echo["iters"] = mc.max_iters;
      echo["eps"] = mc.eps;
      fr = fit_mcem(data.obs, init, mc);
    }
  } catch (const UsageError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("fit: ") + e.what());
  } catch (const std::exception& e) {
    throw NumericError(std::string("fit: ") + e.what());
  }
  echo["init"] = {{"phi", init.phi},
                  {"beta", init.beta},
                  {"alpha", init.alpha},
                  {"gamma1", init.gamma1}};
  echo["seed"] = seed;

  // requested cure profiles override the default distinct-row set
  std::vector<CureEstimate> cure = fr.cure_rates;
  if (cfg.contains("cure-profiles")) {
    std::vector<std::vector<double>> profiles;
    try {
      profiles = cfg.at("cure-profiles").get<std::vector<std::vector<double>>>();
    } catch (const std::exception&) {
      throw UsageError("fit: cure-profiles must be an array of z vectors");
    }
    for (const auto& z : profiles)
      if (z.size() != n_beta)
        throw UsageError("fit: cure profile needs " + std::to_string(n_beta) +
                         " entries (intercept included)");
    if (fr.cov.empty()) {
      cure = point_cure_estimates(fr.params, profiles);
      fr.notes.push_back("cure-rate standard errors unavailable (no covariance)");
    } else {
      cure = cure_rate_inference(fr, profiles);
    }
  }

  for (const auto& note : init_notes) fr.notes.push_back(note);

  json rep;
  rep["schema"] = 1;
  rep["algorithm"] = fr.algorithm;
  const auto names = fr.params.names();
  const auto flat = fr.params.flatten();
  json est = json::object(), se = json::object(), ci = json::object();
  for (size_t k = 0; k < names.size(); ++k) {
    est[names[k]] = flat[k];
    if (!fr.se.empty()) {
      se[names[k]] = fr.se[k];
      ci[names[k]] = {fr.ci95[k].first, fr.ci95[k].second};
    }
  }
  rep["estimates"] = est;
  rep["se"] = fr.se.empty() ? json() : se;
  rep["ci95"] = fr.se.empty() ? json() : ci;
  rep["loglik"] = fr.loglik;
  rep["cure-rates"] = cure_to_json(cure);
  rep["runtime-seconds"] = static_cast<int64_t>(std::floor(fr.wall_seconds));
  rep["seed"] = seed;
  rep["config"] = echo;
  rep["n"] = data.obs.size();
  rep["converged"] = fr.converged;
  rep["boundary"] = fr.boundary;
  rep["mstep-retained"] = fr.mstep_retained;
  rep["notes"] = fr.notes;
  if (!fr.profile.empty()) {
    json prof = json::array();
    for (const auto& pp : fr.profile)
      prof.push_back({{"phi", pp.phi},
                      {"loglik", pp.loglik},
                      {"converged", pp.converged},
                      {"iterations", pp.iterations}});
    rep["profile"] = prof;
  }
  return rep.dump(2) + "\n";
}

std::string run_simulate(const std::string& scenario_json,
                         const std::string& config_json) {
  const json cfg = parse_config(config_json, "simulate config");
  static const std::set<std::string> known{"algos", "replicates", "jobs", "seed"};
  reject_unknown(cfg, known, "simulate config");

  Scenario s;
  try {
    s = scenario_from_json(scenario_json);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (cfg.contains("seed")) s.seed = get_as<uint64_t>(cfg, "seed", s.seed);

  StudyOptions opt;
  opt.algorithms = get_as<std::vector<std::string>>(cfg, "algos", opt.algorithms);
  opt.replicates = get_as<int>(cfg, "replicates", 0);
  opt.jobs = get_as<int>(cfg, "jobs", 1);
  for (const auto& a : opt.algorithms)
    if (a != "sem" && a != "em" && a != "dm" && a != "mcem")
      throw UsageError("simulate: unknown algorithm '" + a + "'");
  if (opt.algorithms.empty()) throw UsageError("simulate: no algorithms requested");
  if (opt.replicates < 0) throw UsageError("simulate: replicates must be >= 0");
  if (opt.jobs < 1) throw UsageError("simulate: jobs must be >= 1");

  StudyResult res;
  try {
    res = run_study(s, opt);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  } catch (const std::exception& e) {
    throw NumericError(e.what());
  }

  json out;
  out["schema"] = 1;
  out["config"] = {{"algos", opt.algorithms},
                   {"replicates", res.scenario.replicates},
                   {"jobs", opt.jobs},
                   {"seed", res.scenario.seed}};
  json files = json::array();
  for (const auto& a : res.algos) {
    files.push_back({{"suffix", "-" + a.algorithm + ".tsv"},
                     {"content", study_params_tsv(res, a)}});
    files.push_back({{"suffix", "-" + a.algorithm + "-cure.tsv"},
                     {"content", study_cure_tsv(res, a)}});
  }
  files.push_back({{"suffix", "-cpu.tsv"}, {"content", study_cpu_tsv(res)}});
  files.push_back({{"suffix", "-raw.json"}, {"content", study_raw_json(res)}});
  out["files"] = files;
  return out.dump(2) + "\n";
}

std::string run_diagnose(const DatasetFile& data, const std::string& fit_json,
                         const std::string& config_json) {
  if (data.obs.empty()) throw UsageError("diagnose: empty dataset");
  const json cfg = parse_config(config_json, "diagnose config");
  static const std::set<std::string> known{"seed", "replicates"};
  reject_unknown(cfg, known, "diagnose config");
  const uint64_t seed = effective_seed(cfg);
  const int replicates = get_as<int>(cfg, "replicates", 5);
  if (replicates < 1) throw UsageError("diagnose: replicates must be >= 1");

  json fit;
  try {
    fit = json::parse(fit_json);
  } catch (const std::exception& e) {
    throw UsageError(std::string("fit report: ") + e.what());
  }
  if (!fit.is_object() || !fit.contains("estimates"))
    throw UsageError("fit report: missing 'estimates'");

  // covariate-layout check against the report's config echo
  if (fit.contains("config")) {
    const json& echo = fit.at("config");
    for (const char* key : {"x-names", "z-names"}) {
      if (!echo.contains(key)) continue;
      const auto want = echo.at(key).get<std::vector<std::string>>();
      const auto& have = key[0] == 'x' ? data.x_names : data.z_names;
      if (want != have) {
        for (const auto& name : want)
          if (std::find(have.begin(), have.end(), name) == have.end())
            throw UsageError("diagnose: dataset is missing covariate '" + name + "'");
        throw UsageError(std::string("diagnose: ") + key +
                         " order differs between fit report and dataset");
      }
    }
  }

  const size_t n_beta = data.obs.front().cov.z.size();
  const size_t n_alpha = data.obs.front().cov.x.size();
  const json& est = fit.at("estimates");
  Params p;
  auto need = [&](const std::string& name) {
    if (!est.contains(name))
      throw UsageError("fit report: missing estimate '" + name + "'");
    return est.at(name).get<double>();
  };
  p.phi = need("phi");
  p.gamma1 = need("gamma1");
  for (size_t k = 0; k < n_beta; ++k) p.beta.push_back(need("beta" + std::to_string(k)));
  for (size_t k = 0; k < n_alpha; ++k)
    p.alpha.push_back(need("alpha" + std::to_string(k)));
  if (!p.valid()) throw UsageError("fit report: invalid parameter values");

  const auto km = kaplan_meier(data.obs, km_group_index(data));

  // fitted S_p on each curve's grid using the group's first observed covariates
  std::ostringstream km_csv, fit_csv;
  km_csv << "group,time,surv\n";
  fit_csv << "group,time,surv\n";
  auto num = [](double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return std::string(buf);
  };
  const int gidx = km_group_index(data);
  for (const auto& curve : km) {
    const Observation* rep_obs = nullptr;
    for (const auto& o : data.obs)
      if (gidx < 0 || o.cov.z[gidx] == curve.group) {
        rep_obs = &o;
        break;
      }
    for (size_t i = 0; i < curve.times.size(); ++i)
      km_csv << num(curve.group) << ',' << num(curve.times[i]) << ','
             << num(curve.surv[i]) << '\n';
    fit_csv << num(curve.group) << ",0,1\n";
    for (const double t : curve.times)
      fit_csv << num(curve.group) << ',' << num(t) << ','
              << num(population_survival(t, p, rep_obs->cov)) << '\n';
  }

  RngStream rng(seed, 0);
  const ResidualSet rs = quantile_residuals(data.obs, p, rng, replicates);
  std::ostringstream res_csv;
  res_csv << "subject_id,residual\n";
  for (size_t i = 0; i < rs.residuals.size(); ++i)
    res_csv << (i + 1) << ',' << num(rs.residuals[i]) << '\n';

  const KsResult ks = ks_normal_test(rs.residuals);
  json ks_json{{"schema", 1},
               {"d", ks.d},
               {"p", ks.p},
               {"n", data.obs.size()},
               {"config", {{"seed", seed}, {"replicates", replicates}}}};

  json out;
  out["schema"] = 1;
  out["ks"] = {{"d", ks.d}, {"p", ks.p}};
  out["files"] = json::array({json{{"suffix", "-km.csv"}, {"content", km_csv.str()}},
                              json{{"suffix", "-fitted.csv"}, {"content", fit_csv.str()}},
                              json{{"suffix", "-residuals.csv"}, {"content", res_csv.str()}},
                              json{{"suffix", "-ks.json"},
                                   {"content", ks_json.dump(2) + "\n"}}});
  return out.dump(2) + "\n";
}

}  // namespace curesem::driver
