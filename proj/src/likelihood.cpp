#include "curesem/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>

#include "prepared.hpp"

namespace curesem {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

namespace detail {

Prepared::Prepared(const Dataset& data) {
  n = static_cast<int>(data.size());
  if (n == 0) throw std::invalid_argument("empty dataset");
  zid.resize(n);
  xid.resize(n);
  t.resize(n);
  logt.resize(n);
  delta.resize(n);
  std::map<std::vector<double>, int> zseen, xseen;
  for (int i = 0; i < n; ++i) {
    const Observation& o = data[i];
    if (!(o.t > 0) || !std::isfinite(o.t))
      throw std::invalid_argument("observation " + std::to_string(i) + ": t must be > 0");
    if (o.delta != 0 && o.delta != 1)
      throw std::invalid_argument("observation " + std::to_string(i) + ": delta must be 0/1");
    t[i] = o.t;
    logt[i] = std::log(o.t);
    delta[i] = o.delta;
    sum_delta += o.delta;
    auto [zit, znew] = zseen.try_emplace(o.cov.z, static_cast<int>(zrows.size()));
    if (znew) zrows.push_back(o.cov.z);
    zid[i] = zit->second;
    auto [xit, xnew] = xseen.try_emplace(o.cov.x, static_cast<int>(xrows.size()));
    if (xnew) xrows.push_back(o.cov.x);
    xid[i] = xit->second;
  }
  xg_events.assign(xrows.size(), 0.0);
  xg_dlogt.assign(xrows.size(), 0.0);
  for (int i = 0; i < n; ++i) {
    if (delta[i]) {
      xg_events[xid[i]] += 1.0;
      xg_dlogt[xid[i]] += logt[i];
    }
  }
}

void build_lc1_stats(const Prepared& pre, const std::vector<double>& m,
                     bool with_hist, Lc1Stats& st) {
  const size_t gz = pre.zrows.size();
  st.mg.assign(gz, 0.0);
  st.ng.assign(gz, 0.0);
  for (int i = 0; i < pre.n; ++i) {
    st.mg[pre.zid[i]] += m[i];
    st.ng[pre.zid[i]] += 1.0;
  }
  st.mhist.clear();
  if (with_hist) {
    std::vector<double> sorted(m);
    std::sort(sorted.begin(), sorted.end());
    for (size_t i = 0; i < sorted.size();) {
      size_t j = i;
      while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
      st.mhist.emplace_back(sorted[i], static_cast<double>(j - i));
      i = j;
    }
  }
}

double lc1_value(const Prepared& pre, const Lc1Stats& st, double phi,
                 const std::vector<double>& beta) {
  if (!(phi > 0) || !std::isfinite(phi)) return -kInf;
  const double inv_phi = 1.0 / phi;
  double out = 0.0;
  if (!st.mhist.empty()) {
    for (const auto& [mv, cnt] : st.mhist) out += cnt * log_gamma(mv + inv_phi);
    out -= pre.n * log_gamma(inv_phi);
  }
  const double logphi = std::log(phi);
  for (size_t g = 0; g < pre.zrows.size(); ++g) {
    const double d = dot(pre.zrows[g], beta);
    const double eta_g = eta(pre.zrows[g], beta);
    const double l1p = std::log1p(phi * eta_g);
    out += st.mg[g] * (logphi + d - l1p) - st.ng[g] * inv_phi * l1p;
  }
  return std::isnan(out) ? -kInf : out;
}

double lc2_value(const Prepared& pre, const std::vector<double>& m,
                 const std::vector<double>& alpha, double gamma1) {
  if (!(gamma1 > 0) || !std::isfinite(gamma1)) return -kInf;
  const size_t gx = pre.xrows.size();
  std::vector<double> a(gx);
  for (size_t g = 0; g < gx; ++g) a[g] = dot(pre.xrows[g], alpha);

  KahanSum acc;
  // event terms collapse over x rows: delta*(-log gamma1 + a_g/gamma1) and
  // (1/gamma1 - 1)*delta*log t
  const double log_g1 = std::log(gamma1);
  for (size_t g = 0; g < gx; ++g)
    acc.add(pre.xg_events[g] * (a[g] / gamma1 - log_g1) +
            (1.0 / gamma1 - 1.0) * pre.xg_dlogt[g]);
  // the -m_i * u_i part stays per observation
  for (int i = 0; i < pre.n; ++i) {
    const double logu = (a[pre.xid[i]] + pre.logt[i]) / gamma1;
    acc.add(-m[i] * std::exp(std::min(logu, 700.0)));
  }
  const double out = acc.value();
  return std::isnan(out) ? -kInf : out;
}

double observed_loglik_fast(const Prepared& pre, const Params& p) {
  if (!p.valid()) return -kInf;
  const size_t gz = pre.zrows.size(), gx = pre.xrows.size();
  std::vector<double> logeta(gz), etav(gz), a(gx);
  for (size_t g = 0; g < gz; ++g) {
    logeta[g] = dot(pre.zrows[g], p.beta);
    etav[g] = eta(pre.zrows[g], p.beta);
  }
  for (size_t g = 0; g < gx; ++g) a[g] = dot(pre.xrows[g], p.alpha);

  const double log_g1 = std::log(p.gamma1);
  KahanSum acc;
  for (int i = 0; i < pre.n; ++i) {
    const double logu = (a[pre.xid[i]] + pre.logt[i]) / p.gamma1;
    const double u = std::exp(std::min(logu, 700.0));
    const double f = -std::expm1(-u);  // Weibull CDF
    const double big_a = std::log1p(p.phi * etav[pre.zid[i]] * f);
    double term = -big_a / p.phi;
    if (pre.delta[i]) {
      const double logf = -log_g1 - pre.logt[i] + logu - u;
      term += logeta[pre.zid[i]] + logf - big_a;
    }
    if (std::isnan(term))
      throw std::runtime_error("observed_loglik: non-finite term at index " +
                               std::to_string(i));
    if (term == -kInf) return -kInf;
    acc.add(term);
  }
  return acc.value();
}

void s_step(const Prepared& pre, const Params& p, RngStream& rng,
            std::vector<double>& m_out) {
  m_out.resize(pre.n);
  const size_t gz = pre.zrows.size(), gx = pre.xrows.size();
  std::vector<double> etav(gz), a(gx), l1p_eta(gz);
  for (size_t g = 0; g < gz; ++g) {
    etav[g] = eta(pre.zrows[g], p.beta);
    l1p_eta[g] = std::log1p(p.phi * etav[g]);
  }
  for (size_t g = 0; g < gx; ++g) a[g] = dot(pre.xrows[g], p.alpha);

  for (int i = 0; i < pre.n; ++i) {
    const double logu = (a[pre.xid[i]] + pre.logt[i]) / p.gamma1;
    const double u = std::exp(std::min(logu, 700.0));
    const double f = -std::expm1(-u);
    const double logpstar =
        std::log1p(p.phi * etav[pre.zid[i]] * f) - l1p_eta[pre.zid[i]];
    NegBinParams nb{1.0 / p.phi + pre.delta[i], std::min(std::exp(logpstar), 1.0)};
    m_out[i] = static_cast<double>(pre.delta[i] + sample_negbin(rng, nb));
  }
}

void e_step(const Prepared& pre, const Params& p, std::vector<double>& m_out) {
  m_out.resize(pre.n);
  const size_t gz = pre.zrows.size(), gx = pre.xrows.size();
  std::vector<double> etav(gz), a(gx);
  for (size_t g = 0; g < gz; ++g) etav[g] = eta(pre.zrows[g], p.beta);
  for (size_t g = 0; g < gx; ++g) a[g] = dot(pre.xrows[g], p.alpha);
  for (int i = 0; i < pre.n; ++i) {
    const double logu = (a[pre.xid[i]] + pre.logt[i]) / p.gamma1;
    const double u = std::exp(std::min(logu, 700.0));
    const double s = std::exp(-u);
    const double f = -std::expm1(-u);
    const double ev = etav[pre.zid[i]];
    const double d = pre.delta[i];
    m_out[i] = (d + d * p.phi * ev + ev * s) / (1.0 + p.phi * ev * f);
  }
}

double mcem_lc1_value(const Prepared& pre, const std::vector<uint32_t>& draws,
                      const Lc1Stats& mean_stats, double phi,
                      const std::vector<double>& beta) {
  if (!(phi > 0) || !std::isfinite(phi)) return -kInf;
  const double inv_phi = 1.0 / phi;
  const size_t total = draws.size();
  const double n_draws = static_cast<double>(total / pre.n);
  // draw-by-draw logGamma average; deliberately the full Monte Carlo cost
  double lg = 0.0;
  for (uint32_t mv : draws) lg += log_gamma(static_cast<double>(mv) + inv_phi);
  lg /= n_draws;
  lg -= pre.n * log_gamma(inv_phi);
  const double linear = lc1_value(pre, mean_stats, phi, beta);
  return std::isnan(lg + linear) ? -kInf : lg + linear;
}

double max_eta(const Prepared& pre, const Params& p) {
  double best = 0.0;
  for (const auto& z : pre.zrows) best = std::max(best, eta(z, p.beta));
  return best;
}

}  // namespace detail

double observed_loglik(const Dataset& data, const Params& p) {
  detail::Prepared pre(data);
  return detail::observed_loglik_fast(pre, p);
}

LoglikSplit complete_loglik_split(const CompleteData& cd, const Params& p) {
  if (cd.obs.size() != cd.m.size())
    throw std::invalid_argument("complete_loglik_split: obs/m length mismatch");
  if (!p.valid()) throw std::invalid_argument("complete_loglik_split: invalid params");
  const double inv_phi = 1.0 / p.phi;
  detail::KahanSum lc1, lc2, k;
  for (size_t i = 0; i < cd.obs.size(); ++i) {
    const Observation& o = cd.obs[i];
    const int64_t m = cd.m[i];
    if (m < o.delta)
      throw std::invalid_argument("complete_loglik_split: m_i < delta_i at index " +
                                  std::to_string(i));
    const double md = static_cast<double>(m);
    const double ev = eta(o.cov.z, p.beta);
    const double l1p = std::log1p(p.phi * ev);
    lc1.add(log_gamma(md + inv_phi) - log_gamma(inv_phi) +
            md * (std::log(p.phi) + dot(o.cov.z, p.beta) - l1p) - inv_phi * l1p);
    const WeibullParams w = weibull_at(p, o.cov);
    const double logS = -std::exp(std::log(w.gamma2 * o.t) / w.gamma1);
    lc2.add((md - o.delta) * logS + (o.delta ? weibull_log_pdf(o.t, w) : 0.0));
    k.add((o.delta ? std::log(md) : 0.0) - log_gamma(md + 1.0));
  }
  return LoglikSplit{lc1.value(), lc2.value(), k.value()};
}

double ConditionalLaw::mean() const {
  if (nb.p == 1.0) return shift;
  return shift + nb.r * (1.0 - nb.p) / nb.p;
}

double ConditionalLaw::pmf(uint64_t m) const {
  if (static_cast<int64_t>(m) < shift) return 0.0;
  return negbin_pmf(m - shift, nb);
}

uint64_t ConditionalLaw::sample(RngStream& rng) const {
  return shift + sample_negbin(rng, nb);
}

ConditionalLaw conditional_law(const Observation& o, const Params& p) {
  if (!p.valid()) throw std::invalid_argument("conditional_law: invalid params");
  const double ev = eta(o.cov.z, p.beta);
  const double f = weibull_cdf(o.t, weibull_at(p, o.cov));
  const double logpstar = std::log1p(p.phi * ev * f) - std::log1p(p.phi * ev);
  ConditionalLaw law;
  law.shift = o.delta;
  law.nb.r = 1.0 / p.phi + o.delta;
  law.nb.p = std::min(std::exp(logpstar), 1.0);
  return law;
}

double conditional_mean(const Observation& o, const Params& p) {
  if (!p.valid()) throw std::invalid_argument("conditional_mean: invalid params");
  const double ev = eta(o.cov.z, p.beta);
  const WeibullParams w = weibull_at(p, o.cov);
  const double s = weibull_surv(o.t, w);
  const double f = weibull_cdf(o.t, w);
  const double d = o.delta;
  return (d + d * p.phi * ev + ev * s) / (1.0 + p.phi * ev * f);
}

}  // namespace curesem
