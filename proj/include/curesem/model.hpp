#pragma once

#include <string>
#include <vector>

#include "curesem/distributions.hpp"

namespace curesem {

// x: lifetime covariates, z: cure covariates; both carry a leading 1 for the
// intercept and may share columns.
struct Covariates {
  std::vector<double> x;
  std::vector<double> z;
};

struct Observation {
  double t = 0.0;
  int delta = 0;  // 1 = event observed, 0 = right-censored
  Covariates cov;
};

using Dataset = std::vector<Observation>;

// theta = (phi, beta, alpha, gamma1); eta = exp(z'beta), gamma2 = exp(x'alpha)
struct Params {
  double phi = 1.0;
  std::vector<double> beta;
  std::vector<double> alpha;
  double gamma1 = 1.0;

  bool valid() const;
  // flat layout [phi, beta..., alpha..., gamma1]; names() matches it
  std::vector<double> flatten() const;
  static Params unflatten(const std::vector<double>& v, size_t n_beta, size_t n_alpha);
  std::vector<std::string> names() const;
};

double dot(const std::vector<double>& a, const std::vector<double>& b);
double eta(const std::vector<double>& z, const std::vector<double>& beta);
double link_gamma2(const std::vector<double>& x, const std::vector<double>& alpha);
WeibullParams weibull_at(const Params& p, const Covariates& c);

// cure fraction p0 = (1 + phi*eta)^(-1/phi)
double cure_rate(double phi, double eta_val);

// improper population survival / density
double population_survival(double t, double phi, double eta_val, const WeibullParams& w);
double population_density(double t, double phi, double eta_val, const WeibullParams& w);
double population_survival(double t, const Params& p, const Covariates& c);
double population_density(double t, const Params& p, const Covariates& c);

}  // namespace curesem
