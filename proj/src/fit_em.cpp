#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "curesem/estimators.hpp"
#include "fit_common.hpp"

namespace curesem {

FitResult fit_em(const Dataset& data, const Params& init, const EmConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  if (!init.valid()) throw std::invalid_argument("fit_em: invalid init");
  if (cfg.phi_grid.empty()) throw std::invalid_argument("fit_em: empty phi grid");
  for (size_t i = 0; i < cfg.phi_grid.size(); ++i) {
    if (!(cfg.phi_grid[i] > 0))
      throw std::invalid_argument("fit_em: phi grid must be positive");
    if (i && cfg.phi_grid[i] <= cfg.phi_grid[i - 1])
      throw std::invalid_argument("fit_em: phi grid must be ascending");
  }
  if (!(cfg.eps > 0)) throw std::invalid_argument("fit_em: eps must be positive");

  detail::Prepared pre(data);
  const size_t na = init.alpha.size();

  FitResult fr;
  fr.algorithm = "em";
  Params warm = init;

  bool have_best = false;
  double best_ll = 0.0;
  Params best_params;
  std::vector<TracePoint> best_trace;

  std::vector<double> mhat;
  detail::Lc1Stats st;
  for (double phi : cfg.phi_grid) {
    Params cur = warm;
    cur.phi = phi;
    std::vector<TracePoint> trace;
    bool converged = false;
    int iters = 0;
    double ll = -std::numeric_limits<double>::infinity();
    std::vector<double> prev = cur.flatten();
    for (int it = 0; it < cfg.max_iters; ++it) {
      detail::e_step(pre, cur, mhat);

      // beta given phi: the logGamma terms are constant, drop them
      detail::build_lc1_stats(pre, mhat, false, st);
      auto f1 = [&](const std::vector<double>& b) {
        return detail::lc1_value(pre, st, phi, b);
      };
      cur.beta = maximize(f1, cur.beta, cfg.opt).x;

      auto f2 = [&](const std::vector<double>& v) {
        const std::vector<double> alpha(v.begin(), v.end() - 1);
        return detail::lc2_value(pre, mhat, alpha, std::exp(std::min(v.back(), 50.0)));
      };
      std::vector<double> v2(na + 1);
      std::copy(cur.alpha.begin(), cur.alpha.end(), v2.begin());
      v2[na] = std::log(cur.gamma1);
      const auto r2 = maximize(f2, v2, cfg.opt);
      cur.alpha.assign(r2.x.begin(), r2.x.end() - 1);
      cur.gamma1 = std::exp(std::min(r2.x[na], 50.0));

      ll = detail::observed_loglik_fast(pre, cur);
      trace.push_back({cur.flatten(), ll});
      iters = it + 1;
      const auto now = cur.flatten();
      if (detail::relative_change(now, prev) < cfg.eps) {
        converged = true;
        break;
      }
      prev = now;
    }
    fr.profile.push_back({phi, ll, converged, iters});
    warm = cur;  // ascending grid: warm-start the next point either way
    if (!converged) {
      fr.notes.push_back("phi=" + std::to_string(phi) +
                         ": EM hit max-iters, grid point excluded");
      continue;
    }
    if (!have_best || ll > best_ll) {
      have_best = true;
      best_ll = ll;
      best_params = cur;
      best_trace = std::move(trace);
    }
  }

  if (!have_best) throw std::runtime_error("fit_em: no grid point converged");
  fr.params = best_params;
  fr.trace = std::move(best_trace);
  detail::finalize_fit(fr, pre);
  fr.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return fr;
}

}  // namespace curesem
