#include <chrono>
#include <cmath>
#include <deque>
#include <stdexcept>

#include "curesem/estimators.hpp"
#include "fit_common.hpp"

namespace curesem {

FitResult fit_mcem(const Dataset& data, const Params& init, const McemConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  if (!init.valid()) throw std::invalid_argument("fit_mcem: invalid init");
  if (cfg.mc_samples < 1) throw std::invalid_argument("fit_mcem: mc_samples >= 1");
  if (!(cfg.eps > 0)) throw std::invalid_argument("fit_mcem: eps must be positive");

  detail::Prepared pre(data);
  RngStream rng(cfg.seed, 0);
  Params cur = init;
  const size_t nb = init.beta.size(), na = init.alpha.size();
  const int n = pre.n, b_cnt = cfg.mc_samples;

  FitResult fr;
  fr.algorithm = "mcem";

  std::vector<uint32_t> draws(static_cast<size_t>(n) * b_cnt);
  std::vector<double> mbar(n);
  detail::Lc1Stats st;
  std::deque<std::vector<double>> window;  // last 3 iterates
  std::vector<double> prev_ma;

  for (int it = 0; it < cfg.max_iters; ++it) {
    // draw mc_samples latent vectors at the current theta (observation-major)
    {
      const size_t gz = pre.zrows.size(), gx = pre.xrows.size();
      std::vector<double> etav(gz), a(gx), l1p(gz);
      for (size_t g = 0; g < gz; ++g) {
        etav[g] = eta(pre.zrows[g], cur.beta);
        l1p[g] = std::log1p(cur.phi * etav[g]);
      }
      for (size_t g = 0; g < gx; ++g) a[g] = dot(pre.xrows[g], cur.alpha);
      for (int i = 0; i < n; ++i) {
        const double logu = (a[pre.xid[i]] + pre.logt[i]) / cur.gamma1;
        const double u = std::exp(std::min(logu, 700.0));
        const double f = -std::expm1(-u);
        const double logpstar =
            std::log1p(cur.phi * etav[pre.zid[i]] * f) - l1p[pre.zid[i]];
        const NegBinParams nbp{1.0 / cur.phi + pre.delta[i],
                               std::min(std::exp(logpstar), 1.0)};
        double acc = 0.0;
        for (int b = 0; b < b_cnt; ++b) {
          const uint64_t mv = pre.delta[i] + sample_negbin(rng, nbp);
          draws[static_cast<size_t>(b) * n + i] = static_cast<uint32_t>(mv);
          acc += static_cast<double>(mv);
        }
        mbar[i] = acc / b_cnt;
      }
    }

    detail::build_lc1_stats(pre, mbar, false, st);
    auto f1 = [&](const std::vector<double>& v) {
      const std::vector<double> beta(v.begin() + 1, v.end());
      return detail::mcem_lc1_value(pre, draws, st, std::exp(std::min(v[0], 50.0)), beta);
    };
    std::vector<double> v1(1 + nb);
    v1[0] = std::log(cur.phi);
    std::copy(cur.beta.begin(), cur.beta.end(), v1.begin() + 1);
    const auto r1 = maximize(f1, v1, cfg.opt);
    cur.phi = std::exp(std::min(r1.x[0], 50.0));
    cur.beta.assign(r1.x.begin() + 1, r1.x.end());

    auto f2 = [&](const std::vector<double>& v) {
      const std::vector<double> alpha(v.begin(), v.end() - 1);
      return detail::lc2_value(pre, mbar, alpha, std::exp(std::min(v.back(), 50.0)));
    };
    std::vector<double> v2(na + 1);
    std::copy(cur.alpha.begin(), cur.alpha.end(), v2.begin());
    v2[na] = std::log(cur.gamma1);
    const auto r2 = maximize(f2, v2, cfg.opt);
    cur.alpha.assign(r2.x.begin(), r2.x.end() - 1);
    cur.gamma1 = std::exp(std::min(r2.x[na], 50.0));

    fr.trace.push_back({cur.flatten(), detail::observed_loglik_fast(pre, cur)});

    // EM-style relative-change rule on a 3-iteration moving average
    window.push_back(cur.flatten());
    if (window.size() > 3) window.pop_front();
    if (window.size() == 3) {
      std::vector<double> ma(window[0].size(), 0.0);
      for (const auto& w : window)
        for (size_t j = 0; j < ma.size(); ++j) ma[j] += w[j] / 3.0;
      if (!prev_ma.empty() && detail::relative_change(ma, prev_ma) < cfg.eps) {
        fr.converged = true;
        fr.params = cur;
        break;
      }
      prev_ma = ma;
    }
  }

  if (fr.params.beta.empty()) {  // max-iters exhausted
    fr.converged = false;
    fr.params = cur;
    fr.notes.push_back("mcem: hit max-iters before moving-average convergence");
  }
  detail::finalize_fit(fr, pre);
  fr.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return fr;
}

}  // namespace curesem
