#pragma once

#include <vector>

#include "curesem/likelihood.hpp"

namespace curesem {

// product-limit estimator; steps at distinct event times, ties resolved
// deaths-before-censorings
struct KmCurve {
  double group = 0.0;  // value of the grouping covariate (0 when pooled)
  std::vector<double> times;
  std::vector<double> surv;
  std::vector<double> se;  // Greenwood
  std::vector<int> at_risk;
  std::vector<int> events;
  double plateau() const { return surv.empty() ? 1.0 : surv.back(); }
};

// group_index: position in Observation.cov.z used to stratify (< 0 pools
// everything into one curve). Curves come back sorted by group value.
std::vector<KmCurve> kaplan_meier(const Dataset& data, int group_index = -1);

// Normalized randomized quantile residuals: u = S_p(t) for events,
// u ~ U(0, S_p(t)) for censored; residual = -Phi^{-1}(u). The randomization
// is repeated `replicates` times; each set is sorted and the elementwise
// median of the ordered sets is returned (ascending).
struct ResidualSet {
  std::vector<double> residuals;
  int replicates = 5;
};
ResidualSet quantile_residuals(const Dataset& data, const Params& p,
                               RngStream& rng, int replicates = 5);

// one-sample KS against the standard normal; p from the asymptotic
// Kolmogorov series at sqrt(n)*D
struct KsResult {
  double d = 0.0;
  double p = 1.0;
};
KsResult ks_normal_test(const std::vector<double>& sample);

}  // namespace curesem
