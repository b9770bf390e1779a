// Shipping gate: one pass/fail line per criterion, nonzero exit on any failure.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "curesem/diagnostics.hpp"
#include "curesem/estimators.hpp"
#include "curesem/io.hpp"
#include "curesem/likelihood.hpp"
#include "curesem/model.hpp"
#include "curesem/simulation.hpp"
#include "json.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

using Outcome = std::pair<bool, std::string>;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string bc_path() { return std::string(CURESEM_SOURCE_DIR) + "/data/bc.csv"; }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---- criterion 1: coefficient anchors ---------------------------------------

Outcome criterion1() {
  struct Anchor {
    double p1, pJ, phi, b0, b1;
  };
  const std::vector<Anchor> anchors{{0.65, 0.25, 3.0, -1.185, 1.057},
                                    {0.65, 0.25, 1.5, -1.182, 0.681},
                                    {0.40, 0.15, 3.0, 0.582, 1.002},
                                    {0.40, 0.15, 1.5, 0.110, 0.568}};
  const auto t0 = std::chrono::steady_clock::now();
  for (const auto& a : anchors) {
    const auto [b0, b1] = curesem::true_betas(a.p1, a.pJ, a.phi);
    if (std::abs(b0 - a.b0) > 5e-4 || std::abs(b1 - a.b1) > 5e-4)
      return {false, "betas(" + fmt(a.p1) + "," + fmt(a.pJ) + "," + fmt(a.phi) +
                         ") = (" + fmt(b0) + "," + fmt(b1) + "), want (" + fmt(a.b0) +
                         "," + fmt(a.b1) + ")"};
  }
  const double secs = seconds_since(t0);
  if (secs >= 1.0) return {false, "took " + fmt(secs) + " s, budget 1 s"};
  return {true, ""};
}

// ---- criterion 2: cure-rate anchors ------------------------------------------

Outcome criterion2() {
  struct Anchor {
    double p1, pJ, phi, q2, q3;
  };
  const std::vector<Anchor> anchors{{0.65, 0.25, 3.0, 0.488, 0.352},
                                    {0.40, 0.15, 1.5, 0.296, 0.213},
                                    {0.40, 0.15, 3.0, 0.290, 0.209}};
  const auto t0 = std::chrono::steady_clock::now();
  for (const auto& a : anchors) {
    const auto [b0, b1] = curesem::true_betas(a.p1, a.pJ, a.phi);
    const auto mid = curesem::intermediate_cure_rates(b0, b1, a.phi);
    if (mid.size() != 2) return {false, "expected 2 interior groups"};
    if (std::abs(mid[0] - a.q2) > 5e-4 || std::abs(mid[1] - a.q3) > 5e-4)
      return {false, "interior rates for (" + fmt(a.p1) + "," + fmt(a.pJ) + "," +
                         fmt(a.phi) + ") = (" + fmt(mid[0]) + "," + fmt(mid[1]) +
                         "), want (" + fmt(a.q2) + "," + fmt(a.q3) + ")"};
  }
  const double secs = seconds_since(t0);
  if (secs >= 1.0) return {false, "took " + fmt(secs) + " s, budget 1 s"};
  return {true, ""};
}

// ---- criterion 3: log-likelihood at the published estimates ------------------

curesem::Params published_sem() {
  curesem::Params p;
  p.phi = 3.281;
  p.beta = {-2.756, 2.801};
  p.alpha = {-1.152, -0.488};
  p.gamma1 = 0.381;
  return p;
}

curesem::Params published_em() {
  curesem::Params p;
  p.phi = 3.400;
  p.beta = {-2.346, 2.510};
  p.alpha = {-1.334, -0.357};
  p.gamma1 = 0.377;
  return p;
}

Outcome criterion3() {
  if (!fs::exists(bc_path()))
    return {false, "fixture data/bc.csv missing; run scripts/make_bc_fixture.py"};
  const auto df = curesem::load_dataset(bc_path());
  if (df.obs.size() != 686)
    return {false, "fixture has " + std::to_string(df.obs.size()) + " rows, want 686"};
  const auto t0 = std::chrono::steady_clock::now();
  const double ll_sem = curesem::observed_loglik(df.obs, published_sem());
  const double ll_em = curesem::observed_loglik(df.obs, published_em());
  const double secs = seconds_since(t0);
  if (std::abs(ll_sem - (-790.690)) > 0.5)
    return {false, "loglik at SEM estimates = " + fmt(ll_sem) + ", want -790.690 +- 0.5"};
  if (std::abs(ll_em - (-790.989)) > 0.5)
    return {false, "loglik at EM estimates = " + fmt(ll_em) + ", want -790.989 +- 0.5"};
  if (secs >= 1.0) return {false, "took " + fmt(secs) + " s, budget 1 s"};
  return {true, ""};
}

// ---- criterion 4: EM real-data fit through the CLI ---------------------------

Outcome criterion4() {
  if (!fs::exists(bc_path()))
    return {false, "fixture data/bc.csv missing; run scripts/make_bc_fixture.py"};
  const std::string out =
      (fs::temp_directory_path() / "curesem_acceptance_em.json").string();
  const std::string cmd = std::string(CURESEM_CLI_PATH) + " fit --data " + bc_path() +
                          " --algo em --phi-grid 0.1:10:0.1 --init auto --out " + out +
                          " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  if (rc != 0) return {false, "cli exited with status " + std::to_string(rc)};
  std::ifstream in(out);
  if (!in) return {false, "cli wrote no report"};
  json rep;
  in >> rep;
  fs::remove(out);
  const double phi = rep.at("estimates").at("phi").get<double>();
  const double ll = rep.at("loglik").get<double>();
  if (std::abs(phi - 3.4) > 1e-9)
    return {false, "phi-hat = " + fmt(phi) + ", want the grid member 3.4"};
  if (std::abs(ll - (-790.989)) > 0.5)
    return {false, "loglik = " + fmt(ll) + ", want -790.989 +- 0.5"};
  if (!rep.at("converged").get<bool>()) return {false, "fit reported non-convergence"};
  return {true, ""};
}

// ---- criterion 5: desk-scale simulation gates --------------------------------

Outcome criterion5() {
  curesem::Scenario s;  // n=400, high cure, phi=3, 50 replicates, fixed seed
  curesem::StudyOptions o;
  o.algorithms = {"sem"};
  o.jobs = 4;
  const auto res = curesem::run_study(s, o);
  const auto& a = res.algos.front();
  if (a.failures > 5)
    return {false, std::to_string(a.failures) + " of 50 replicates failed"};

  const std::vector<std::pair<std::string, double>> gates{{"beta0", 0.621},
                                                          {"beta1", 0.334},
                                                          {"alpha0", 0.162},
                                                          {"alpha1", 0.063},
                                                          {"gamma1", 0.041}};
  std::string detail;
  for (const auto& [name, se] : gates) {
    for (const auto& row : a.params) {
      if (row.name != name) continue;
      if (std::abs(row.bias) > 3.0 * se)
        detail += name + " bias " + fmt(row.bias) + " exceeds " + fmt(3.0 * se) + "; ";
    }
  }
  for (const char* name : {"alpha0", "alpha1", "gamma1"}) {
    for (const auto& row : a.params) {
      if (row.name != name) continue;
      if (row.cp < 0.85 || row.cp > 1.0)
        detail += std::string(name) + " coverage " + fmt(row.cp) + " outside [0.85,1]; ";
    }
  }
  if (!detail.empty()) return {false, detail};
  return {true, ""};
}

// ---- criterion 6: property suite under two minutes ---------------------------

Outcome criterion6(const fs::path& exe_dir) {
  const fs::path unit = exe_dir / "curesem_tests";
  if (!fs::exists(unit)) return {false, "unit binary not found at " + unit.string()};
  const auto t0 = std::chrono::steady_clock::now();
  const int rc = std::system((unit.string() + " > /dev/null 2>&1").c_str());
  const double secs = seconds_since(t0);
  if (rc != 0) return {false, "unit suite exited with status " + std::to_string(rc)};
  if (secs >= 120.0) return {false, "unit suite took " + fmt(secs) + " s, budget 120 s"};
  return {true, ""};
}

// ---- criterion 7: residual calibration at the fitted model -------------------

Outcome criterion7() {
  if (!fs::exists(bc_path()))
    return {false, "fixture data/bc.csv missing; run scripts/make_bc_fixture.py"};
  const auto df = curesem::load_dataset(bc_path());
  const auto init = curesem::initial_values(df.obs, curesem::kaplan_meier(df.obs, 1));
  curesem::EmConfig ec;
  ec.phi_grid = curesem::parse_phi_grid("0.1:10:0.1");
  const auto fr = curesem::fit_em(df.obs, init, ec);
  const auto& est = fr.params;

  // rebuild the generating scenario around the fitted parameters: cure targets
  // reproduce beta-hat through true_betas, censoring matches the cohort
  curesem::Scenario s;
  s.n = 2001;  // spec asks ~2000; group sizes must divide evenly
  s.groups = 3;
  s.p0_first = curesem::cure_rate(est.phi, curesem::eta({1.0, 1.0}, est.beta));
  s.p0_last = curesem::cure_rate(est.phi, curesem::eta({1.0, 3.0}, est.beta));
  s.phi = est.phi;
  s.gamma1 = est.gamma1;
  s.alpha = est.alpha;
  s.replicates = 20;
  s.seed = 20260816;
  std::vector<int> cens(3, 0), tot(3, 0);
  for (const auto& o : df.obs) {
    const int g = static_cast<int>(o.cov.z[1]) - 1;
    ++tot[g];
    cens[g] += o.delta == 0 ? 1 : 0;
  }
  s.censor_targets.assign(3, 0.0);
  for (int g = 0; g < 3; ++g)
    s.censor_targets[g] = static_cast<double>(cens[g]) / tot[g];
  s.validate();

  const curesem::Params truth = curesem::scenario_truth(s);
  for (size_t k = 0; k < truth.beta.size(); ++k)
    if (std::abs(truth.beta[k] - est.beta[k]) > 1e-8)
      return {false, "target inversion failed to reproduce the fitted betas"};

  std::vector<double> xi;
  for (int g = 1; g <= s.groups; ++g)
    xi.push_back(curesem::solve_censoring_rate(
        s, g, curesem::RngStream(s.seed, (uint64_t{1} << 32) + g)));

  int passing = 0;
  double worst = 1.0;
  for (int rep = 0; rep < s.replicates; ++rep) {
    curesem::RngStream base(s.seed, static_cast<uint64_t>(rep));
    auto data_rng = base.substream(0);
    const auto data = curesem::generate_dataset(s, xi, data_rng);
    auto resid_rng = base.substream(1);
    const auto rs = curesem::quantile_residuals(data, truth, resid_rng);
    const double p = curesem::ks_normal_test(rs.residuals).p;
    if (p > 0.01) ++passing;
    worst = std::min(worst, p);
  }
  if (passing < 18)
    return {false, std::to_string(passing) + " of 20 repetitions passed KS at 0.01 " +
                       "(worst p = " + fmt(worst) + ")"};
  return {true, ""};
}

// ---- criterion 8: CPU comparison ----------------------------------------------

Outcome criterion8() {
  curesem::Scenario s;  // high cure, phi=3
  s.n = 200;
  s.seed = 31415;
  s.validate();
  std::vector<double> xi;
  for (int g = 1; g <= s.groups; ++g)
    xi.push_back(curesem::solve_censoring_rate(
        s, g, curesem::RngStream(s.seed, (uint64_t{1} << 32) + g)));
  curesem::RngStream rng(s.seed, 0);
  const auto data = curesem::generate_dataset(s, xi, rng);
  const auto truth = curesem::scenario_truth(s);

  curesem::SemConfig sc;
  const auto sem = curesem::fit_sem(data, truth, sc);
  curesem::McemConfig mc;  // 500 Monte Carlo samples
  const auto mcem = curesem::fit_mcem(data, truth, mc);

  if (!(mcem.wall_seconds >= 2.0 * sem.wall_seconds))
    return {false, "mcem " + fmt(mcem.wall_seconds) + " s vs sem " +
                       fmt(sem.wall_seconds) + " s; need a 2x gap"};
  return {true, "mcem/sem = " + fmt(mcem.wall_seconds / sem.wall_seconds) + "x"};
}

}  // namespace

int main(int, char** argv) {
  const fs::path exe_dir = fs::path(argv[0]).parent_path();
  bool all = true;
  const auto run = [&](int k, const std::function<Outcome()>& fn) {
    Outcome r{false, "unknown"};
    try {
      r = fn();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    if (r.first) {
      const std::string note = r.second.empty() ? "" : " (" + r.second + ")";
      std::printf("ACCEPTANCE %d: PASS%s\n", k, note.c_str());
    } else {
      std::printf("ACCEPTANCE %d: FAIL (%s)\n", k, r.second.c_str());
    }
    std::fflush(stdout);
    all = all && r.first;
  };

  run(1, criterion1);
  run(2, criterion2);
  run(3, criterion3);
  run(4, criterion4);
  run(5, criterion5);
  run(6, [&] { return criterion6(exe_dir); });
  run(7, criterion7);
  run(8, criterion8);
  return all ? 0 : 1;
}
