#include "curesem/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "fit_common.hpp"

namespace curesem {

namespace detail {

Objective loglik_objective(const Prepared& pre, size_t n_beta, size_t n_alpha) {
  return [&pre, n_beta, n_alpha](const std::vector<double>& v) {
    return observed_loglik_fast(pre, Params::unflatten(v, n_beta, n_alpha));
  };
}

double relative_change(const std::vector<double>& now, const std::vector<double>& prev) {
  double d = 0.0;
  for (size_t j = 0; j < now.size(); ++j)
    d = std::max(d, std::fabs(now[j] - prev[j]) / std::max(1.0, std::fabs(prev[j])));
  return d;
}

void finalize_fit(FitResult& fr, const Prepared& pre) {
  fr.loglik = observed_loglik_fast(pre, fr.params);
  fr.boundary = fr.params.phi > 50.0 || max_eta(pre, fr.params) < 1e-8;

  const size_t nb = fr.params.beta.size(), na = fr.params.alpha.size();
  fr.se.clear();
  fr.ci95.clear();
  fr.cov.clear();
  try {
    const auto hess = numeric_hessian(loglik_objective(pre, nb, na), fr.params.flatten());
    auto neg = hess;
    for (auto& row : neg)
      for (auto& v : row) v = -v;
    fr.cov = spd_inverse(neg);
  } catch (const std::exception& e) {
    fr.notes.push_back(std::string("hessian unavailable: ") + e.what());
  }
  if (!fr.cov.empty()) {
    const auto est = fr.params.flatten();
    fr.se.resize(est.size());
    fr.ci95.resize(est.size());
    for (size_t j = 0; j < est.size(); ++j) {
      fr.se[j] = std::sqrt(std::max(fr.cov[j][j], 0.0));
      fr.ci95[j] = {est[j] - 1.96 * fr.se[j], est[j] + 1.96 * fr.se[j]};
    }
    // default cure-rate profiles: the distinct observed z rows
    std::vector<std::vector<double>> profiles = pre.zrows;
    if (profiles.size() > 16) profiles.resize(16);
    std::sort(profiles.begin(), profiles.end());
    fr.cure_rates = cure_rate_inference(fr, profiles);
  } else if (fr.notes.empty()) {
    fr.notes.push_back("hessian not negative definite; SEs unavailable");
  }
}

}  // namespace detail

std::vector<CureEstimate> cure_rate_inference(
    const FitResult& fit, const std::vector<std::vector<double>>& profiles) {
  if (fit.cov.empty())
    throw std::runtime_error("cure_rate_inference: fit has no covariance matrix");
  const size_t nb = fit.params.beta.size();
  // (phi, beta) sub-block of the flat-layout covariance
  std::vector<size_t> idx(1 + nb);
  idx[0] = 0;
  for (size_t j = 0; j < nb; ++j) idx[j + 1] = 1 + j;

  std::vector<CureEstimate> out;
  out.reserve(profiles.size());
  for (const auto& z : profiles) {
    auto p0_at = [&](const std::vector<double>& v) {
      const std::vector<double> beta(v.begin() + 1, v.end());
      return cure_rate(v[0], eta(z, beta));
    };
    std::vector<double> v(1 + nb);
    v[0] = fit.params.phi;
    std::copy(fit.params.beta.begin(), fit.params.beta.end(), v.begin() + 1);

    CureEstimate ce;
    ce.z = z;
    ce.estimate = p0_at(v);
    std::vector<double> grad(v.size());
    for (size_t j = 0; j < v.size(); ++j) {
      const double h = 1e-5 * std::max(1.0, std::fabs(v[j]));
      auto vp = v, vm = v;
      vp[j] += h;
      vm[j] -= h;
      grad[j] = (p0_at(vp) - p0_at(vm)) / (2.0 * h);
    }
    double var = 0.0;
    for (size_t j = 0; j < grad.size(); ++j)
      for (size_t k = 0; k < grad.size(); ++k)
        var += grad[j] * grad[k] * fit.cov[idx[j]][idx[k]];
    ce.se = std::sqrt(std::max(var, 0.0));
    ce.ci95 = {std::clamp(ce.estimate - 1.96 * ce.se, 0.0, 1.0),
               std::clamp(ce.estimate + 1.96 * ce.se, 0.0, 1.0)};
    out.push_back(std::move(ce));
  }
  return out;
}

Params initial_values(const Dataset& data, const std::vector<KmCurve>& km) {
  if (km.size() < 3)
    throw std::invalid_argument("initial_values: needs >= 3 covariate groups");
  for (const auto& o : data)
    if (o.cov.z.size() != 2 || o.cov.x.size() != 2)
      throw std::invalid_argument(
          "initial_values: needs intercept+group covariates (two columns)");

  // cure block: least-squares fit of (beta0, beta1, log phi) to the KM plateaus
  std::vector<double> gval, plat;
  for (const auto& c : km) {
    gval.push_back(c.group);
    plat.push_back(std::clamp(c.plateau(), 1e-3, 0.999));
  }
  auto neg_sse = [&](const std::vector<double>& v) {
    const double phi = std::exp(std::clamp(v[2], -20.0, 20.0));
    double sse = 0.0;
    for (size_t g = 0; g < gval.size(); ++g) {
      const double e = std::exp(std::clamp(v[0] + v[1] * gval[g], -200.0, 200.0));
      const double r = cure_rate(phi, e) - plat[g];
      sse += r * r;
    }
    return -sse;
  };
  OptimConfig oc{.max_iters = 2000, .x_tol = 1e-12, .f_tol = 1e-16, .restarts = 2};
  OptimResult best;
  best.value = -std::numeric_limits<double>::infinity();
  for (const auto& s0 : std::vector<std::vector<double>>{
           {0, 0, 0}, {-1, 1, 1}, {1, -1, std::log(3.0)}, {0, 0, -0.7}}) {
    const auto r = maximize(neg_sse, s0, oc);
    if (r.value > best.value) best = r;
  }

  // lifetime block: Weibull moment match on uncensored times
  std::vector<double> ut;
  for (const auto& o : data)
    if (o.delta) ut.push_back(o.t);
  double gamma1 = 1.0;
  double mu = 1.0;
  if (ut.size() >= 2) {
    mu = 0.0;
    for (double v : ut) mu += v;
    mu /= static_cast<double>(ut.size());
    double vv = 0.0;
    for (double v : ut) vv += (v - mu) * (v - mu);
    vv /= static_cast<double>(ut.size() - 1);
    const double cv2 = vv / (mu * mu);
    auto g = [&](double g1) {
      return std::exp(log_gamma(1.0 + 2.0 * g1) - 2.0 * log_gamma(1.0 + g1)) - 1.0 - cv2;
    };
    if (g(1e-3) < 0.0 && g(10.0) > 0.0)
      gamma1 = find_root(g, 1e-3, 10.0, 1e-10);
  } else if (ut.size() == 1) {
    mu = ut[0];
  }

  // alpha from matching per-group uncensored means; x = (1, group)
  const double lgm = log_gamma(1.0 + gamma1);
  std::vector<std::pair<double, double>> pts;  // (group value, target x'alpha)
  {
    std::map<double, std::pair<double, int>> acc;
    for (const auto& o : data)
      if (o.delta) {
        auto& e = acc[o.cov.x[1]];
        e.first += o.t;
        e.second += 1;
      }
    for (const auto& [g, e] : acc)
      pts.emplace_back(g, lgm - std::log(e.first / e.second));
  }
  std::vector<double> alpha{lgm - std::log(mu), 0.0};
  if (pts.size() >= 2) {
    // 2x2 least squares for alpha0 + alpha1*g
    double sn = static_cast<double>(pts.size());
    double sg = 0, sgg = 0, sc = 0, sgc = 0;
    for (const auto& [g, c] : pts) {
      sg += g;
      sgg += g * g;
      sc += c;
      sgc += g * c;
    }
    const double det = sn * sgg - sg * sg;
    if (std::fabs(det) > 1e-12) {
      alpha[1] = (sn * sgc - sg * sc) / det;
      alpha[0] = (sc - alpha[1] * sg) / sn;
    }
  }

  Params p;
  p.phi = std::exp(std::clamp(best.x[2], -20.0, 20.0));
  p.beta = {best.x[0], best.x[1]};
  p.alpha = alpha;
  p.gamma1 = gamma1;
  return p;
}

}  // namespace curesem
