#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

#include "curesem/diagnostics.hpp"
#include "curesem/rng.hpp"

namespace curesem {

namespace {

KmCurve km_one_group(std::vector<std::pair<double, int>> td, double group) {
  std::sort(td.begin(), td.end());  // ties: deaths sort before nothing special;
                                    // grouping below keeps censored at-risk at t
  KmCurve c;
  c.group = group;
  const int n = static_cast<int>(td.size());
  double s = 1.0, gw = 0.0;  // Greenwood cumulative sum
  int i = 0, removed = 0;
  while (i < n) {
    const double t = td[i].first;
    int deaths = 0, ties = 0;
    for (; i < n && td[i].first == t; ++i) {
      deaths += td[i].second;
      ++ties;
    }
    const int at_risk = n - removed;
    removed += ties;
    if (deaths == 0) continue;
    s *= 1.0 - static_cast<double>(deaths) / at_risk;
    if (at_risk > deaths)
      gw += static_cast<double>(deaths) /
            (static_cast<double>(at_risk) * (at_risk - deaths));
    c.times.push_back(t);
    c.surv.push_back(s);
    c.se.push_back(s > 0 ? s * std::sqrt(gw) : 0.0);
    c.at_risk.push_back(at_risk);
    c.events.push_back(deaths);
  }
  return c;
}

// asymptotic Kolmogorov tail probability P(K > lambda)
double kolmogorov_q(double lambda) {
  if (!(lambda > 0)) return 1.0;
  constexpr double pi = std::numbers::pi;
  double q;
  if (lambda < 1.18) {
    const double t = std::exp(-pi * pi / (8.0 * lambda * lambda));
    const double cdf = std::sqrt(2.0 * pi) / lambda *
                       (t + std::pow(t, 9.0) + std::pow(t, 25.0) + std::pow(t, 49.0));
    q = 1.0 - cdf;
  } else {
    q = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 100; ++k) {
      const double term = 2.0 * std::exp(-2.0 * k * k * lambda * lambda);
      q += sign * term;
      if (term < 1e-14) break;
      sign = -sign;
    }
  }
  return std::clamp(q, 0.0, 1.0);
}

}  // namespace

std::vector<KmCurve> kaplan_meier(const Dataset& data, int group_index) {
  std::map<double, std::vector<std::pair<double, int>>> groups;
  for (size_t i = 0; i < data.size(); ++i) {
    const auto& o = data[i];
    if (!(o.t > 0) || !std::isfinite(o.t))
      throw std::invalid_argument("kaplan_meier: nonpositive time at row " +
                                  std::to_string(i));
    double g = 0.0;
    if (group_index >= 0) {
      if (group_index >= static_cast<int>(o.cov.z.size()))
        throw std::invalid_argument("kaplan_meier: group index out of range at row " +
                                    std::to_string(i));
      g = o.cov.z[group_index];
    }
    groups[g].emplace_back(o.t, o.delta);
  }
  std::vector<KmCurve> out;
  for (auto& [g, td] : groups) out.push_back(km_one_group(std::move(td), g));
  return out;
}

ResidualSet quantile_residuals(const Dataset& data, const Params& p, RngStream& rng,
                               int replicates) {
  if (replicates < 1)
    throw std::invalid_argument("quantile_residuals: replicates >= 1");
  if (!p.valid()) throw std::invalid_argument("quantile_residuals: invalid params");
  const size_t n = data.size();
  std::vector<double> sp(n);
  for (size_t i = 0; i < n; ++i)
    sp[i] = population_survival(data[i].t, p, data[i].cov);

  std::vector<std::vector<double>> sets(replicates, std::vector<double>(n));
  for (int k = 0; k < replicates; ++k) {
    auto& r = sets[k];
    for (size_t i = 0; i < n; ++i) {
      double u = data[i].delta ? sp[i] : rng.uniform() * sp[i];
      u = std::clamp(u, 1e-12, 1.0 - 1e-12);
      r[i] = -normal_quantile(u);
    }
    std::sort(r.begin(), r.end());
  }

  ResidualSet out;
  out.replicates = replicates;
  out.residuals.resize(n);
  std::vector<double> col(replicates);
  for (size_t i = 0; i < n; ++i) {
    for (int k = 0; k < replicates; ++k) col[k] = sets[k][i];
    std::sort(col.begin(), col.end());
    out.residuals[i] = replicates % 2 ? col[replicates / 2]
                                      : 0.5 * (col[replicates / 2 - 1] +
                                               col[replicates / 2]);
  }
  return out;
}

KsResult ks_normal_test(const std::vector<double>& sample) {
  if (sample.empty()) throw std::invalid_argument("ks_normal_test: empty sample");
  std::vector<double> x = sample;
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    const double f = normal_cdf(x[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  KsResult res;
  res.d = d;
  res.p = kolmogorov_q(std::sqrt(n) * d);
  return res;
}

}  // namespace curesem
