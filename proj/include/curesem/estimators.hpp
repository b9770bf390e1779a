#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "curesem/diagnostics.hpp"
#include "curesem/likelihood.hpp"
#include "curesem/optimize.hpp"

namespace curesem {

inline constexpr uint64_t kDefaultSeed = 12345;

enum class SemRule { Mean, MaxLoglik };

struct SemConfig {
  int iters = 1500;    // total S/M cycles (R)
  int burnin = 500;    // discarded prefix (r); 0 <= burnin < iters
  SemRule rule = SemRule::MaxLoglik;
  uint64_t seed = kDefaultSeed;
  OptimConfig opt{.max_iters = 300, .x_tol = 1e-8, .f_tol = 1e-9, .restarts = 0};
};

struct EmConfig {
  std::vector<double> phi_grid;  // ascending, positive
  double eps = 5e-4;             // relative parameter-change tolerance
  int max_iters = 500;
  OptimConfig opt{.max_iters = 400, .x_tol = 1e-9, .f_tol = 1e-10, .restarts = 0};
};

struct DmConfig {
  OptimConfig opt{.max_iters = 4000, .x_tol = 1e-10, .f_tol = 1e-11, .restarts = 2};
};

struct McemConfig {
  int mc_samples = 500;
  double eps = 1e-3;  // on a 3-iteration moving average of parameter change
  int max_iters = 100;
  uint64_t seed = kDefaultSeed;
  OptimConfig opt{.max_iters = 300, .x_tol = 1e-8, .f_tol = 1e-9, .restarts = 0};
};

struct TracePoint {
  std::vector<double> theta;  // flat layout
  double loglik = 0.0;
};

struct ProfilePoint {
  double phi = 0.0;
  double loglik = 0.0;
  bool converged = false;
  int iterations = 0;
};

struct CureEstimate {
  std::vector<double> z;
  double estimate = 0.0;
  double se = 0.0;
  std::pair<double, double> ci95{0.0, 0.0};
};

struct FitResult {
  Params params;
  double loglik = 0.0;
  std::vector<double> se;                         // empty if Hessian unusable
  std::vector<std::pair<double, double>> ci95;    // empty iff se empty
  std::vector<std::vector<double>> cov;           // flat-layout covariance
  std::vector<CureEstimate> cure_rates;           // distinct observed z rows
  std::vector<TracePoint> trace;
  std::vector<ProfilePoint> profile;              // EM only
  std::string algorithm;
  double wall_seconds = 0.0;
  bool converged = true;
  bool boundary = false;
  int mstep_retained = 0;  // SEM iterations that kept a block after M-step failure
  std::vector<std::string> notes;
};

FitResult fit_sem(const Dataset& data, const Params& init, const SemConfig& cfg);
FitResult fit_em(const Dataset& data, const Params& init, const EmConfig& cfg);
FitResult fit_dm(const Dataset& data, const Params& init, const DmConfig& cfg);
FitResult fit_mcem(const Dataset& data, const Params& init, const McemConfig& cfg);

// delta-method cure-rate inference at the given z profiles; requires fit.cov
std::vector<CureEstimate> cure_rate_inference(const FitResult& fit,
                                              const std::vector<std::vector<double>>& profiles);

// KM-plateau solve for (beta, phi) plus Weibull moment matching for
// (alpha, gamma1); needs >= 3 groups and two-column x/z (intercept + group)
Params initial_values(const Dataset& data, const std::vector<KmCurve>& km);

}  // namespace curesem
