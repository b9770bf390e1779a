#include "curesem/model.hpp"

#include <cmath>
#include <stdexcept>

namespace curesem {

bool Params::valid() const {
  if (!(std::isfinite(phi) && phi > 0)) return false;
  if (!(std::isfinite(gamma1) && gamma1 > 0)) return false;
  if (beta.empty() || alpha.empty()) return false;
  for (double v : beta)
    if (!std::isfinite(v)) return false;
  for (double v : alpha)
    if (!std::isfinite(v)) return false;
  return true;
}

std::vector<double> Params::flatten() const {
  std::vector<double> v;
  v.reserve(2 + beta.size() + alpha.size());
  v.push_back(phi);
  v.insert(v.end(), beta.begin(), beta.end());
  v.insert(v.end(), alpha.begin(), alpha.end());
  v.push_back(gamma1);
  return v;
}

Params Params::unflatten(const std::vector<double>& v, size_t n_beta, size_t n_alpha) {
  if (v.size() != 2 + n_beta + n_alpha)
    throw std::invalid_argument("Params::unflatten: length mismatch");
  Params p;
  p.phi = v[0];
  p.beta.assign(v.begin() + 1, v.begin() + 1 + n_beta);
  p.alpha.assign(v.begin() + 1 + n_beta, v.begin() + 1 + n_beta + n_alpha);
  p.gamma1 = v.back();
  return p;
}

std::vector<std::string> Params::names() const {
  std::vector<std::string> out;
  out.reserve(2 + beta.size() + alpha.size());
  out.push_back("phi");
  for (size_t j = 0; j < beta.size(); ++j) out.push_back("beta" + std::to_string(j));
  for (size_t j = 0; j < alpha.size(); ++j) out.push_back("alpha" + std::to_string(j));
  out.push_back("gamma1");
  return out;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: dimension mismatch");
  double s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

namespace {
// keeps exp() finite while the optimizer roams
double clamped_exp(double x) {
  if (x > 700.0) x = 700.0;
  if (x < -700.0) x = -700.0;
  return std::exp(x);
}
}  // namespace

double eta(const std::vector<double>& z, const std::vector<double>& beta) {
  return clamped_exp(dot(z, beta));
}

double link_gamma2(const std::vector<double>& x, const std::vector<double>& alpha) {
  return clamped_exp(dot(x, alpha));
}

WeibullParams weibull_at(const Params& p, const Covariates& c) {
  return WeibullParams{p.gamma1, link_gamma2(c.x, p.alpha)};
}

double cure_rate(double phi, double eta_val) {
  if (!(phi > 0) || !(eta_val >= 0))
    throw std::domain_error("cure_rate: needs phi > 0, eta >= 0");
  return std::exp(-std::log1p(phi * eta_val) / phi);
}

double population_survival(double t, double phi, double eta_val, const WeibullParams& w) {
  const double f = weibull_cdf(t, w);
  return std::exp(-std::log1p(phi * eta_val * f) / phi);
}

double population_density(double t, double phi, double eta_val, const WeibullParams& w) {
  const double f = weibull_cdf(t, w);
  return eta_val * weibull_pdf(t, w) *
         std::exp(-(1.0 / phi + 1.0) * std::log1p(phi * eta_val * f));
}

double population_survival(double t, const Params& p, const Covariates& c) {
  return population_survival(t, p.phi, eta(c.z, p.beta), weibull_at(p, c));
}

double population_density(double t, const Params& p, const Covariates& c) {
  return population_density(t, p.phi, eta(c.z, p.beta), weibull_at(p, c));
}

}  // namespace curesem
