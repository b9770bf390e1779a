#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>

#include "curesem/simulation.hpp"

namespace curesem {

namespace {

Covariates group_cov(int j) {
  const std::vector<double> row{1.0, static_cast<double>(j)};
  return Covariates{row, row};
}

double group_cure(const Scenario& s, int j) {
  const auto [b0, b1] = true_betas(s.p0_first, s.p0_last, s.phi, s.groups);
  return cure_rate(s.phi, std::exp(b0 + j * b1));
}

}  // namespace

std::pair<double, double> true_betas(double p0_first, double p0_last, double phi,
                                     int groups) {
  if (!(phi > 0) || groups < 2 || !(p0_last > 0) || !(p0_first < 1) ||
      !(p0_last <= p0_first))
    throw std::invalid_argument("true_betas: need 0 < p0_last <= p0_first < 1, phi > 0");
  const double a1 = std::log(std::pow(p0_first, -phi) - 1.0);
  const double aJ = std::log(std::pow(p0_last, -phi) - 1.0);
  const double beta1 = (aJ - a1) / (groups - 1);
  const double beta0 = a1 - std::log(phi) - beta1;
  return {beta0, beta1};
}

std::vector<double> intermediate_cure_rates(double beta0, double beta1, double phi,
                                            int groups) {
  std::vector<double> out;
  for (int j = 2; j < groups; ++j)
    out.push_back(cure_rate(phi, std::exp(beta0 + j * beta1)));
  return out;
}

Params scenario_truth(const Scenario& s) {
  const auto [b0, b1] = true_betas(s.p0_first, s.p0_last, s.phi, s.groups);
  Params p;
  p.phi = s.phi;
  p.beta = {b0, b1};
  p.alpha = s.alpha;
  p.gamma1 = s.gamma1;
  return p;
}

void Scenario::validate() const {
  if (groups < 2) throw std::invalid_argument("scenario: groups must be >= 2");
  if (n < groups || n % groups != 0)
    throw std::invalid_argument("scenario: n must be a positive multiple of groups");
  if (!(phi > 0) || !(gamma1 > 0))
    throw std::invalid_argument("scenario: phi and gamma1 must be positive");
  if (alpha.size() != 2)
    throw std::invalid_argument("scenario: alpha must be (alpha0, alpha1)");
  if (!(p0_last > 0) || !(p0_first < 1) || !(p0_last <= p0_first))
    throw std::invalid_argument("scenario: need 0 < p0_last <= p0_first < 1");
  if (static_cast<int>(censor_targets.size()) != groups)
    throw std::invalid_argument("scenario: need one censoring target per group");
  if (replicates < 1) throw std::invalid_argument("scenario: replicates must be >= 1");
  for (int j = 1; j <= groups; ++j) {
    const double p0j = group_cure(*this, j);
    const double pj = censor_targets[j - 1];
    if (!(p0j < pj && pj < 1))
      throw std::invalid_argument("scenario: group " + std::to_string(j) +
                                  " violates cure < censoring < 1 (cure " +
                                  std::to_string(p0j) + ", censoring target " +
                                  std::to_string(pj) + ")");
  }
}

double solve_censoring_rate(const Scenario& s, int group, RngStream rng, int ndraws) {
  if (group < 1 || group > s.groups)
    throw std::invalid_argument("solve_censoring_rate: group out of range");
  if (ndraws < 1) throw std::invalid_argument("solve_censoring_rate: ndraws >= 1");
  const Params truth = scenario_truth(s);
  const Covariates cov = group_cov(group);
  const double eta_j = eta(cov.z, truth.beta);
  const WeibullParams w = weibull_at(truth, cov);
  const double target = s.censor_targets[group - 1];

  std::vector<double> t(ndraws);
  for (auto& v : t) v = rng.exponential(1.0);

  // P(censored) = E[S_p(C)] with C = t/xi; increasing in xi from p0 to 1
  auto censored_frac = [&](double xi) {
    double acc = 0.0;
    for (double ti : t) acc += population_survival(ti / xi, truth.phi, eta_j, w);
    return acc / ndraws;
  };
  auto g = [&](double xi) { return censored_frac(xi) - target; };

  double lo = 1e-10, hi = 1.0;
  for (int k = 0; g(lo) >= 0 && k < 60; ++k) lo /= 1e3;
  int expand = 0;
  while (g(hi) <= 0 && expand++ < 80) hi *= 2;
  if (!(g(lo) < 0 && g(hi) > 0))
    throw std::invalid_argument("scenario: cannot bracket censoring rate for group " +
                                std::to_string(group));
  return find_root(g, lo, hi, 1e-12);
}

Dataset generate_dataset(const Scenario& s, const std::vector<double>& xi,
                         RngStream& rng) {
  if (static_cast<int>(xi.size()) != s.groups)
    throw std::invalid_argument("generate_dataset: need one censoring rate per group");
  const Params truth = scenario_truth(s);
  const int per = s.n / s.groups;
  Dataset data;
  data.reserve(s.n);
  for (int j = 1; j <= s.groups; ++j) {
    const Covariates cov = group_cov(j);
    const double eta_j = eta(cov.z, truth.beta);
    const WeibullParams w = weibull_at(truth, cov);
    const NegBinParams nb{1.0 / truth.phi, 1.0 / (1.0 + truth.phi * eta_j)};
    for (int i = 0; i < per; ++i) {
      const double c = rng.exponential(xi[j - 1]);
      const uint64_t m = sample_negbin(rng, nb);
      Observation obs;
      obs.cov = cov;
      if (m == 0) {
        obs.t = c;
        obs.delta = 0;
      } else {
        // min of m iid Weibulls: (gamma2*Y)^(1/gamma1) ~ Exp(m)
        const double e = rng.exponential(1.0);
        const double y = std::pow(e / m, truth.gamma1) / w.gamma2;
        obs.delta = y < c ? 1 : 0;
        obs.t = std::min(y, c);
      }
      data.push_back(std::move(obs));
    }
  }
  return data;
}

namespace {

FitResult run_algo(const std::string& algo, const Dataset& data, const Params& init,
                   const StudyOptions& o, uint64_t fit_seed) {
  if (algo == "sem") {
    SemConfig cfg = o.sem;
    cfg.seed = fit_seed;
    return fit_sem(data, init, cfg);
  }
  if (algo == "em") {
    EmConfig cfg = o.em;
    if (cfg.phi_grid.empty())
      for (double v = 0.5; v <= 10.0 + 1e-9; v += 0.5) cfg.phi_grid.push_back(v);
    return fit_em(data, init, cfg);
  }
  if (algo == "dm") return fit_dm(data, init, o.dm);
  if (algo == "mcem") {
    McemConfig cfg = o.mcem;
    cfg.seed = fit_seed;
    return fit_mcem(data, init, cfg);
  }
  throw std::invalid_argument("unknown algorithm: " + algo);
}

ReplicateRecord make_record(int rep, const FitResult& fr,
                            const std::vector<double>& truth_flat,
                            const std::vector<std::vector<double>>& profiles) {
  ReplicateRecord rec;
  rec.rep = rep;
  rec.ok = true;
  rec.estimate = fr.params.flatten();
  rec.se = fr.se;
  rec.loglik = fr.loglik;
  rec.seconds = fr.wall_seconds;
  if (!fr.se.empty()) {
    rec.covered.resize(truth_flat.size());
    for (size_t k = 0; k < truth_flat.size(); ++k)
      rec.covered[k] = (fr.ci95[k].first <= truth_flat[k] &&
                        truth_flat[k] <= fr.ci95[k].second)
                           ? 1
                           : 0;
  }
  if (!fr.cov.empty()) {
    rec.cure = cure_rate_inference(fr, profiles);
  } else {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (const auto& z : profiles) {
      CureEstimate ce;
      ce.z = z;
      ce.estimate = cure_rate(fr.params.phi, eta(z, fr.params.beta));
      ce.se = nan;
      ce.ci95 = {nan, nan};
      rec.cure.push_back(ce);
    }
  }
  return rec;
}

}  // namespace

StudyResult run_study(const Scenario& s, const StudyOptions& o) {
  s.validate();
  if (o.algorithms.empty()) throw std::invalid_argument("run_study: no algorithms");
  const int reps = o.replicates > 0 ? o.replicates : s.replicates;
  const Params truth = scenario_truth(s);
  const std::vector<double> truth_flat = truth.flatten();
  const std::vector<std::string> names = truth.names();
  const size_t na = o.algorithms.size();

  StudyResult res;
  res.scenario = s;
  res.scenario.replicates = reps;
  res.truth = truth;
  for (int j = 1; j <= s.groups; ++j)
    res.xi.push_back(
        solve_censoring_rate(s, j, RngStream(s.seed, (uint64_t{1} << 32) + j)));

  std::vector<std::vector<double>> profiles;
  for (int j = 1; j <= s.groups; ++j) profiles.push_back(group_cov(j).z);

  res.algos.resize(na);
  for (size_t a = 0; a < na; ++a) {
    res.algos[a].algorithm = o.algorithms[a];
    res.algos[a].records.resize(reps);
  }

  // replicate rep depends only on (seed, rep): identical output for any jobs
  auto run_rep = [&](int rep) {
    RngStream base(s.seed, static_cast<uint64_t>(rep));
    RngStream data_rng = base.substream(0);
    RngStream jitter_rng = base.substream(1);
    Dataset data;
    std::string gen_error;
    try {
      data = generate_dataset(s, res.xi, data_rng);
    } catch (const std::exception& e) {
      gen_error = std::string("data generation failed: ") + e.what();
    }
    std::vector<double> v = truth_flat;
    for (auto& x : v) x *= 1.0 + o.init_jitter * (2.0 * jitter_rng.uniform() - 1.0);
    const Params init = Params::unflatten(v, truth.beta.size(), truth.alpha.size());
    for (size_t a = 0; a < na; ++a) {
      ReplicateRecord& rec = res.algos[a].records[rep];
      if (!gen_error.empty()) {
        rec.rep = rep;
        rec.error = gen_error;
        continue;
      }
      const uint64_t fit_seed = base.substream(2 + a).next_u64();
      try {
        const FitResult fr = run_algo(o.algorithms[a], data, init, o, fit_seed);
        rec = make_record(rep, fr, truth_flat, profiles);
      } catch (const std::exception& e) {
        rec.rep = rep;
        rec.error = e.what();
      }
    }
  };

  const int jobs = std::min(std::max(1, o.jobs), reps);
  if (jobs <= 1) {
    for (int rep = 0; rep < reps; ++rep) run_rep(rep);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int k = 0; k < jobs; ++k)
      pool.emplace_back([&] {
        for (int rep = next.fetch_add(1); rep < reps; rep = next.fetch_add(1))
          run_rep(rep);
      });
    for (auto& th : pool) th.join();
  }

  // aggregate in replicate order
  for (size_t a = 0; a < na; ++a) {
    AlgoStudy& st = res.algos[a];
    for (const auto& rec : st.records) {
      if (!rec.ok) ++st.failures;
      st.cpu_seconds += rec.seconds;
    }
    for (size_t k = 0; k < truth_flat.size(); ++k) {
      SummaryRow row;
      row.name = names[k];
      row.truth = truth_flat[k];
      double sum = 0, sum_sq = 0, sum_se = 0;
      int n_ok = 0, n_se = 0, n_cov = 0;
      for (const auto& rec : st.records) {
        if (!rec.ok) continue;
        ++n_ok;
        sum += rec.estimate[k];
        sum_sq += (rec.estimate[k] - row.truth) * (rec.estimate[k] - row.truth);
        if (!rec.se.empty()) {
          ++n_se;
          sum_se += rec.se[k];
          n_cov += rec.covered[k];
        }
      }
      if (n_ok > 0) {
        row.mean = sum / n_ok;
        row.bias = row.mean - row.truth;
        row.rmse = std::sqrt(sum_sq / n_ok);
      }
      if (n_se > 0) {
        row.mean_se = sum_se / n_se;
        row.cp = static_cast<double>(n_cov) / n_se;
      }
      row.cp_denom = n_se;
      st.params.push_back(row);
    }
    for (int j = 1; j <= s.groups; ++j) {
      SummaryRow row;
      row.name = "p0_" + std::to_string(j);
      row.truth = group_cure(s, j);
      double sum = 0, sum_sq = 0, sum_se = 0;
      int n_ok = 0, n_se = 0, n_cov = 0;
      for (const auto& rec : st.records) {
        if (!rec.ok || rec.cure.empty()) continue;
        const CureEstimate& ce = rec.cure[j - 1];
        ++n_ok;
        sum += ce.estimate;
        sum_sq += (ce.estimate - row.truth) * (ce.estimate - row.truth);
        if (std::isfinite(ce.se)) {
          ++n_se;
          sum_se += ce.se;
          n_cov += (ce.ci95.first <= row.truth && row.truth <= ce.ci95.second) ? 1 : 0;
        }
      }
      if (n_ok > 0) {
        row.mean = sum / n_ok;
        row.bias = row.mean - row.truth;
        row.rmse = std::sqrt(sum_sq / n_ok);
      }
      if (n_se > 0) {
        row.mean_se = sum_se / n_se;
        row.cp = static_cast<double>(n_cov) / n_se;
      }
      row.cp_denom = n_se;
      st.cure.push_back(row);
    }
  }
  return res;
}

}  // namespace curesem
