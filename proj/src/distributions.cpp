#include "curesem/distributions.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace curesem {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double log_gamma(double x) {
#if defined(__GLIBC__)
  int sign = 0;
  return ::lgamma_r(x, &sign);  // avoids the signgam global
#else
  return std::lgamma(x);
#endif
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::domain_error("normal_quantile: p must lie in (0,1)");

  // Acklam's rational approximation, then one Halley step against the
  // erfc-based CDF (pushes the error to ~1e-15)
  static const double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                              -2.759285104469687e+02, 1.383577518672690e+02,
                              -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                              -1.556989798598866e+02, 6.680131188771972e+01,
                              -1.328068155288572e+01};
  static const double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                              -2.400758277161838e+00, -2.549732539343734e+00,
                              4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                              2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double plow = 0.02425;

  double x;
  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  if (std::fabs(x) < 37.0) {
    const double e = normal_cdf(x) - p;
    const double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
    x -= u / (1.0 + 0.5 * x * u);
  }
  return x;
}

bool WeibullParams::valid() const {
  return std::isfinite(gamma1) && std::isfinite(gamma2) && gamma1 > 0 && gamma2 > 0;
}

namespace {
// (gamma2*t)^(1/gamma1) in log space
double weibull_u(double t, const WeibullParams& w) {
  return std::exp(std::log(w.gamma2 * t) / w.gamma1);
}
}  // namespace

double weibull_log_pdf(double t, const WeibullParams& w) {
  if (!(t > 0)) return -kInf;
  const double logu = std::log(w.gamma2 * t) / w.gamma1;
  return -std::log(w.gamma1 * t) + logu - std::exp(logu);
}

double weibull_pdf(double t, const WeibullParams& w) {
  if (t < 0) return 0.0;
  if (t == 0.0) {
    if (w.gamma1 < 1.0) return 0.0;          // shape > 1
    if (w.gamma1 == 1.0) return w.gamma2;    // exponential
    return kInf;                             // shape < 1
  }
  return std::exp(weibull_log_pdf(t, w));
}

double weibull_cdf(double t, const WeibullParams& w) {
  if (!(t > 0)) return 0.0;
  return -std::expm1(-weibull_u(t, w));
}

double weibull_surv(double t, const WeibullParams& w) {
  if (!(t > 0)) return 1.0;
  return std::exp(-weibull_u(t, w));
}

bool NegBinParams::valid() const {
  return std::isfinite(r) && r > 0 && p > 0 && p <= 1.0;
}

double negbin_log_pmf(uint64_t m, const NegBinParams& nb) {
  if (nb.p == 1.0) return m == 0 ? 0.0 : -kInf;
  const double md = static_cast<double>(m);
  return log_gamma(md + nb.r) - log_gamma(nb.r) - log_gamma(md + 1.0) +
         nb.r * std::log(nb.p) + md * std::log1p(-nb.p);
}

double negbin_pmf(uint64_t m, const NegBinParams& nb) {
  return std::exp(negbin_log_pmf(m, nb));
}

uint64_t sample_negbin(RngStream& rng, const NegBinParams& nb) {
  if (!nb.valid()) throw std::domain_error("sample_negbin: invalid parameters");
  if (nb.p == 1.0) return 0;
  const double lambda = rng.gamma(nb.r, (1.0 - nb.p) / nb.p);
  return rng.poisson(lambda);
}

}  // namespace curesem
