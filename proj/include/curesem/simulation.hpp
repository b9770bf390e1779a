#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "curesem/estimators.hpp"

namespace curesem {

// group cure/censoring targets indexed j = 1..groups, covariates x = z = (1, j)
struct Scenario {
  int n = 400;
  int groups = 4;
  double p0_first = 0.65;            // cure target, group 1
  double p0_last = 0.25;             // cure target, last group
  std::vector<double> censor_targets{0.85, 0.65, 0.50, 0.35};
  double phi = 3.0;
  double gamma1 = 0.3;
  std::vector<double> alpha{-1.5, 0.5};
  int replicates = 50;
  uint64_t seed = kDefaultSeed;

  void validate() const;  // throws std::invalid_argument with the offending group
};

// beta1 = (log(p0J^-phi - 1) - log(p01^-phi - 1))/(J-1),
// beta0 = log(p01^-phi - 1) - log(phi) - beta1
std::pair<double, double> true_betas(double p0_first, double p0_last, double phi,
                                     int groups = 4);
// p0j for the interior groups j = 2..groups-1
std::vector<double> intermediate_cure_rates(double beta0, double beta1, double phi,
                                            int groups = 4);
// full true parameter vector for a scenario
Params scenario_truth(const Scenario& s);

// Censoring rate xi_j solving mean_i S_p(t_i/xi_j) = p_j over N standard
// exponential draws t_i taken once from rng. C ~ Exp(rate xi_j).
double solve_censoring_rate(const Scenario& s, int group, RngStream rng,
                            int ndraws = 10000);

Dataset generate_dataset(const Scenario& s, const std::vector<double>& xi,
                         RngStream& rng);

struct StudyOptions {
  std::vector<std::string> algorithms{"sem"};
  int jobs = 1;
  double init_jitter = 0.2;  // uniform +-20% around truth, per coordinate
  SemConfig sem;
  EmConfig em;
  DmConfig dm;
  McemConfig mcem;
  int replicates = 0;  // 0: use scenario.replicates
};

struct ReplicateRecord {
  int rep = 0;
  bool ok = false;
  std::string error;
  std::vector<double> estimate;          // flat layout
  std::vector<double> se;                // empty if unavailable
  double loglik = 0.0;
  double seconds = 0.0;
  std::vector<int> covered;              // 95% CI covers truth (empty if no se)
  std::vector<CureEstimate> cure;        // per group, z = (1, j)
};

struct SummaryRow {
  std::string name;
  double truth = 0.0;
  double mean = 0.0;
  double mean_se = 0.0;
  double bias = 0.0;
  double rmse = 0.0;
  double cp = 0.0;     // coverage over replicates with usable SEs
  int cp_denom = 0;
};

struct AlgoStudy {
  std::string algorithm;
  std::vector<ReplicateRecord> records;
  std::vector<SummaryRow> params;
  std::vector<SummaryRow> cure;
  double cpu_seconds = 0.0;
  int failures = 0;
};

struct StudyResult {
  Scenario scenario;
  Params truth;
  std::vector<double> xi;  // per group
  std::vector<AlgoStudy> algos;
};

// Replicate r uses streams derived from (seed, r) only, so results are
// identical for any jobs count; summaries aggregate in replicate order.
StudyResult run_study(const Scenario& s, const StudyOptions& o);

}  // namespace curesem
