#pragma once

#include <cstdint>

#include "curesem/rng.hpp"

namespace curesem {

double log_gamma(double x);       // x > 0
double normal_cdf(double x);
double normal_quantile(double p); // p in (0,1); throws std::domain_error outside

// Weibull in the model's parameterization:
//   S(t) = exp(-(gamma2*t)^(1/gamma1)),  shape = 1/gamma1, scale = 1/gamma2.
struct WeibullParams {
  double gamma1 = 1.0;
  double gamma2 = 1.0;
  bool valid() const;
};

double weibull_pdf(double t, const WeibullParams& w);
double weibull_log_pdf(double t, const WeibullParams& w);
double weibull_cdf(double t, const WeibullParams& w);
double weibull_surv(double t, const WeibullParams& w);

// Negative binomial with dispersion r > 0 and success probability p in (0,1]:
//   P(M=m) = Gamma(m+r)/(Gamma(r) m!) * p^r (1-p)^m,  mean r(1-p)/p.
struct NegBinParams {
  double r = 1.0;
  double p = 0.5;
  bool valid() const;
};

double negbin_log_pmf(uint64_t m, const NegBinParams& nb);
double negbin_pmf(uint64_t m, const NegBinParams& nb);

// gamma-Poisson mixture; exact for non-integer r, degenerate at 0 when p=1
uint64_t sample_negbin(RngStream& rng, const NegBinParams& nb);

}  // namespace curesem
