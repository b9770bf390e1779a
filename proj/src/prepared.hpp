#pragma once

// Internal dataset view with distinct covariate rows collapsed, plus the
// block objectives the fitting engines maximize. The z-linear and x-linear
// pieces of the likelihood only depend on covariates through their distinct
// rows, which turns M-step objective evaluations from O(n) into O(#groups)
// everywhere except the per-observation Weibull terms.

#include <cstdint>
#include <utility>
#include <vector>

#include "curesem/likelihood.hpp"
#include "curesem/rng.hpp"

namespace curesem::detail {

struct KahanSum {
  double s = 0.0, c = 0.0;
  void add(double x) {
    const double y = x - c;
    const double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  double value() const { return s; }
};

struct Prepared {
  int n = 0;
  std::vector<std::vector<double>> zrows, xrows;  // distinct rows, first-seen order
  std::vector<int> zid, xid;                      // per-observation row index
  std::vector<double> t, logt;
  std::vector<int> delta;
  std::vector<double> xg_events;   // per x row: sum of delta
  std::vector<double> xg_dlogt;    // per x row: sum of delta*log t
  double sum_delta = 0;

  explicit Prepared(const Dataset& data);
};

// sufficient statistics of an imputed (or expected) m-vector for lc1
struct Lc1Stats {
  std::vector<double> mg;  // per z row: sum of m
  std::vector<double> ng;  // per z row: count
  std::vector<std::pair<double, double>> mhist;  // (m value, count); integer m
};

// with_hist: include the logGamma(m + 1/phi) terms (needs integer m-values in
// mhist); the profile-EM reduced objective drops them (constant in beta).
void build_lc1_stats(const Prepared& pre, const std::vector<double>& m,
                     bool with_hist, Lc1Stats& st);
double lc1_value(const Prepared& pre, const Lc1Stats& st, double phi,
                 const std::vector<double>& beta);

// lc2 = sum (m_i - delta_i) log S(t_i) + delta_i log f(t_i)
double lc2_value(const Prepared& pre, const std::vector<double>& m,
                 const std::vector<double>& alpha, double gamma1);

double observed_loglik_fast(const Prepared& pre, const Params& p);

// one stochastic imputation of the latent counts at theta
void s_step(const Prepared& pre, const Params& p, RngStream& rng,
            std::vector<double>& m_out);

// expected latent counts at theta (EM E-step)
void e_step(const Prepared& pre, const Params& p, std::vector<double>& m_out);

// Monte Carlo averaged lc1 over stored draws (flattened draw-major, size
// n_draws * n): the logGamma part is averaged draw by draw, the linear part
// collapses to the draw means exactly.
double mcem_lc1_value(const Prepared& pre, const std::vector<uint32_t>& draws,
                      const Lc1Stats& mean_stats, double phi,
                      const std::vector<double>& beta);

double max_eta(const Prepared& pre, const Params& p);

}  // namespace curesem::detail
