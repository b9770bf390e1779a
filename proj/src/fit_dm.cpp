#include <chrono>
#include <cmath>
#include <stdexcept>

#include "curesem/estimators.hpp"
#include "fit_common.hpp"

namespace curesem {

FitResult fit_dm(const Dataset& data, const Params& init, const DmConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  if (!init.valid()) throw std::invalid_argument("fit_dm: invalid init");

  detail::Prepared pre(data);
  const size_t nb = init.beta.size(), na = init.alpha.size();

  // phi and gamma1 on log scale for the search
  auto to_internal = [&](const Params& p) {
    std::vector<double> v = p.flatten();
    v.front() = std::log(p.phi);
    v.back() = std::log(p.gamma1);
    return v;
  };
  auto from_internal = [&](std::vector<double> v) {
    v.front() = std::exp(std::min(v.front(), 50.0));
    v.back() = std::exp(std::min(v.back(), 50.0));
    return Params::unflatten(v, nb, na);
  };
  auto f = [&](const std::vector<double>& v) {
    return detail::observed_loglik_fast(pre, from_internal(v));
  };

  const auto r = maximize(f, to_internal(init), cfg.opt);

  FitResult fr;
  fr.algorithm = "dm";
  fr.params = from_internal(r.x);
  fr.converged = r.converged;
  fr.trace.push_back({init.flatten(), detail::observed_loglik_fast(pre, init)});
  fr.trace.push_back({fr.params.flatten(), r.value});
  detail::finalize_fit(fr, pre);
  fr.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return fr;
}

}  // namespace curesem
