#include <chrono>
#include <cmath>
#include <stdexcept>

#include "curesem/estimators.hpp"
#include "fit_common.hpp"

namespace curesem {

FitResult fit_sem(const Dataset& data, const Params& init, const SemConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  if (!init.valid()) throw std::invalid_argument("fit_sem: invalid init");
  if (cfg.burnin < 0 || cfg.burnin >= cfg.iters)
    throw std::invalid_argument("fit_sem: need 0 <= burnin < iters");

  detail::Prepared pre(data);
  RngStream rng(cfg.seed, 0);
  Params cur = init;
  const size_t nb = init.beta.size(), na = init.alpha.size();

  FitResult fr;
  fr.algorithm = "sem";
  fr.trace.reserve(cfg.iters);

  std::vector<double> m;
  detail::Lc1Stats st;
  for (int k = 0; k < cfg.iters; ++k) {
    detail::s_step(pre, cur, rng, m);
    detail::build_lc1_stats(pre, m, true, st);

    // theta1 = (phi, beta), phi on log scale
    std::vector<double> v1(1 + nb);
    v1[0] = std::log(cur.phi);
    std::copy(cur.beta.begin(), cur.beta.end(), v1.begin() + 1);
    auto f1 = [&](const std::vector<double>& v) {
      const std::vector<double> beta(v.begin() + 1, v.end());
      return detail::lc1_value(pre, st, std::exp(std::min(v[0], 50.0)), beta);
    };
    try {
      const auto r1 = maximize(f1, v1, cfg.opt);
      cur.phi = std::exp(std::min(r1.x[0], 50.0));
      cur.beta.assign(r1.x.begin() + 1, r1.x.end());
    } catch (const std::exception&) {
      ++fr.mstep_retained;  // keep the previous block
    }

    // theta2 = (alpha, gamma1), gamma1 on log scale
    std::vector<double> v2(na + 1);
    std::copy(cur.alpha.begin(), cur.alpha.end(), v2.begin());
    v2[na] = std::log(cur.gamma1);
    auto f2 = [&](const std::vector<double>& v) {
      const std::vector<double> alpha(v.begin(), v.end() - 1);
      return detail::lc2_value(pre, m, alpha, std::exp(std::min(v.back(), 50.0)));
    };
    try {
      const auto r2 = maximize(f2, v2, cfg.opt);
      cur.alpha.assign(r2.x.begin(), r2.x.end() - 1);
      cur.gamma1 = std::exp(std::min(r2.x[na], 50.0));
    } catch (const std::exception&) {
      ++fr.mstep_retained;
    }

    fr.trace.push_back({cur.flatten(), detail::observed_loglik_fast(pre, cur)});
  }

  // point estimate from the post-burn-in chain
  if (cfg.rule == SemRule::MaxLoglik) {
    int arg = cfg.burnin;
    for (int k = cfg.burnin; k < cfg.iters; ++k)
      if (fr.trace[k].loglik > fr.trace[arg].loglik) arg = k;
    fr.params = Params::unflatten(fr.trace[arg].theta, nb, na);
  } else {
    const double cnt = cfg.iters - cfg.burnin;
    std::vector<double> avg(fr.trace[0].theta.size(), 0.0);
    double logphi = 0.0;
    for (int k = cfg.burnin; k < cfg.iters; ++k) {
      for (size_t j = 0; j < avg.size(); ++j) avg[j] += fr.trace[k].theta[j] / cnt;
      logphi += std::log(fr.trace[k].theta[0]) / cnt;
    }
    avg[0] = std::exp(logphi);  // phi averaged on log scale
    fr.params = Params::unflatten(avg, nb, na);
  }

  detail::finalize_fit(fr, pre);
  fr.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return fr;
}

}  // namespace curesem
