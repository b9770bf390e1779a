#pragma once

#include <functional>
#include <vector>

namespace curesem {

struct OptimConfig {
  int max_iters = 500;
  double x_tol = 1e-9;
  double f_tol = 1e-10;
  int restarts = 1;  // extra Nelder-Mead runs restarted from the incumbent
};

struct OptimResult {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

using Objective = std::function<double(const std::vector<double>&)>;

// Nelder-Mead ascent (reflect 1, expand 2, contract 0.5, shrink 0.5; initial
// simplex edge max(0.1, 0.1|x_j|)). Non-finite objective values mid-search are
// treated as -inf; a non-finite value at the start throws. The result is the
// best point seen and never scores below the start.
OptimResult maximize(const Objective& f, std::vector<double> start,
                     const OptimConfig& cfg = {});

// plain bisection; requires a sign change on [lo, hi]
double find_root(const std::function<double(double)>& g, double lo, double hi,
                 double tol = 1e-10);

// central-difference Hessian with h_j = 1e-4*max(1,|x0_j|), symmetrized;
// throws if any entry is non-finite
std::vector<std::vector<double>> numeric_hessian(const Objective& f,
                                                 const std::vector<double>& x0);

// Cholesky-based inverse; empty result if the matrix is not positive definite
std::vector<std::vector<double>> spd_inverse(const std::vector<std::vector<double>>& a);

}  // namespace curesem
