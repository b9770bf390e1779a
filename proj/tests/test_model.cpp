#include <cmath>
#include <vector>

#include "curesem/model.hpp"
#include "doctest.h"

using namespace curesem;

namespace {

Params example_params() {
  Params p;
  p.phi = 2.3;
  p.beta = {-0.8, 0.9};
  p.alpha = {-0.4, 0.25};
  p.gamma1 = 0.6;
  return p;
}

const Covariates kCov{{1.0, 2.0}, {1.0, 2.0}};

}  // namespace

TEST_CASE("flat layout round-trips and names match") {
  const Params p = example_params();
  const auto v = p.flatten();
  REQUIRE(v.size() == 6);
  CHECK(v[0] == p.phi);
  CHECK(v[1] == p.beta[0]);
  CHECK(v[2] == p.beta[1]);
  CHECK(v[3] == p.alpha[0]);
  CHECK(v[4] == p.alpha[1]);
  CHECK(v[5] == p.gamma1);
  const Params q = Params::unflatten(v, 2, 2);
  CHECK(q.flatten() == v);
  const auto names = p.names();
  REQUIRE(names.size() == 6);
  CHECK(names[0] == "phi");
  CHECK(names[1] == "beta0");
  CHECK(names[2] == "beta1");
  CHECK(names[3] == "alpha0");
  CHECK(names[4] == "alpha1");
  CHECK(names[5] == "gamma1");
}

TEST_CASE("parameter validation rejects out-of-domain values") {
  CHECK(example_params().valid());
  Params p = example_params();
  p.phi = 0.0;
  CHECK(!p.valid());
  p = example_params();
  p.phi = -1.0;
  CHECK(!p.valid());
  p = example_params();
  p.gamma1 = 0.0;
  CHECK(!p.valid());
  p = example_params();
  p.beta[1] = std::nan("");
  CHECK(!p.valid());
}

TEST_CASE("linear predictors evaluate as advertised") {
  const Params p = example_params();
  CHECK(eta(kCov.z, p.beta) == doctest::Approx(std::exp(-0.8 + 0.9 * 2)).epsilon(1e-14));
  CHECK(link_gamma2(kCov.x, p.alpha) ==
        doctest::Approx(std::exp(-0.4 + 0.25 * 2)).epsilon(1e-14));
  const WeibullParams w = weibull_at(p, kCov);
  CHECK(w.gamma1 == p.gamma1);
  CHECK(w.gamma2 == doctest::Approx(link_gamma2(kCov.x, p.alpha)).epsilon(1e-14));
}

TEST_CASE("cure rate follows the negative-binomial zero mass") {
  CHECK(cure_rate(2.0, 1.5) == doctest::Approx(std::pow(1 + 2.0 * 1.5, -0.5)).epsilon(1e-13));
  // phi -> 0 recovers the Poisson zero mass exp(-eta)
  CHECK(cure_rate(1e-9, 0.7) == doctest::Approx(std::exp(-0.7)).epsilon(1e-6));
  CHECK(cure_rate(3.0, 0.0) == doctest::Approx(1.0));
}

TEST_CASE("population survival interpolates between 1 and the cure fraction") {
  const Params p = example_params();
  const double e = eta(kCov.z, p.beta);
  const WeibullParams w = weibull_at(p, kCov);
  CHECK(population_survival(0.0, p.phi, e, w) == doctest::Approx(1.0));
  const double p0 = cure_rate(p.phi, e);
  CHECK(population_survival(1e9, p.phi, e, w) == doctest::Approx(p0).epsilon(1e-12));
  double last = 1.0;
  for (double t = 0.1; t < 20.0; t *= 1.5) {
    const double s = population_survival(t, p.phi, e, w);
    CHECK(s <= last + 1e-14);
    CHECK(s >= p0 - 1e-14);
    last = s;
    // direct closed form {1/(1+phi*eta*F)}^(1/phi)
    const double expect = std::pow(1.0 + p.phi * e * weibull_cdf(t, w), -1.0 / p.phi);
    CHECK(s == doctest::Approx(expect).epsilon(1e-13));
  }
  // the Covariates overload agrees
  CHECK(population_survival(0.8, p, kCov) ==
        doctest::Approx(population_survival(0.8, p.phi, e, w)).epsilon(1e-14));
}

TEST_CASE("population density is the negative survival derivative") {
  const Params p = example_params();
  const double e = eta(kCov.z, p.beta);
  const WeibullParams w = weibull_at(p, kCov);
  for (const double t : {0.2, 0.7, 1.9, 4.0}) {
    const double h = 1e-6 * t;
    const double num =
        (population_survival(t - h, p.phi, e, w) - population_survival(t + h, p.phi, e, w)) /
        (2 * h);
    CHECK(population_density(t, p.phi, e, w) == doctest::Approx(num).epsilon(1e-6));
    // direct closed form eta f {1/(1+phi*eta*F)}^(1/phi+1)
    const double expect = e * weibull_pdf(t, w) *
                          std::pow(1.0 + p.phi * e * weibull_cdf(t, w), -(1.0 / p.phi + 1.0));
    CHECK(population_density(t, p.phi, e, w) == doctest::Approx(expect).epsilon(1e-13));
    CHECK(population_density(t, p, kCov) ==
          doctest::Approx(population_density(t, p.phi, e, w)).epsilon(1e-14));
  }
}

TEST_CASE("population density integrates to the susceptible mass") {
  const Params p = example_params();
  const double e = eta(kCov.z, p.beta);
  const WeibullParams w = weibull_at(p, kCov);
  const double p0 = cure_rate(p.phi, e);
  // integrate in v = (gamma2 t)^(1/gamma1); the density itself has an
  // unbounded derivative at 0, but density * dt/dv is smooth with limit eta
  const double V = 40.0;
  const double tV = std::pow(V, p.gamma1) / w.gamma2;
  REQUIRE(population_survival(tV, p.phi, e, w) - p0 < 1e-12);
  auto g = [&](double v) {
    if (v == 0.0) return e;
    const double t = std::pow(v, p.gamma1) / w.gamma2;
    const double jac = p.gamma1 * std::pow(v, p.gamma1 - 1.0) / w.gamma2;
    return population_density(t, p.phi, e, w) * jac;
  };
  const int n = 20000;  // even
  const double h = V / n;
  double acc = g(0.0) + g(V);
  for (int i = 1; i < n; ++i) acc += g(i * h) * (i % 2 ? 4.0 : 2.0);
  const double integral = acc * h / 3.0;
  CHECK(integral == doctest::Approx(1.0 - p0).epsilon(1e-6));
}
