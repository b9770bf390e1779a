#include "curesem/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace curesem {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double safe_eval(const Objective& f, const std::vector<double>& x) {
  double v;
  try {
    v = f(x);
  } catch (...) {
    return -kInf;
  }
  return std::isnan(v) ? -kInf : v;
}

struct Vertex {
  std::vector<double> x;
  double f;
};

// one Nelder-Mead run; simplex seeded at start, returns iterations used
int nelder_mead(const Objective& f, const std::vector<double>& start,
                const OptimConfig& cfg, Vertex& best, bool& converged) {
  const size_t d = start.size();
  std::vector<Vertex> v(d + 1);
  v[0] = {start, safe_eval(f, start)};
  for (size_t j = 0; j < d; ++j) {
    std::vector<double> x = start;
    x[j] += std::max(0.1, 0.1 * std::fabs(x[j]));
    v[j + 1] = {std::move(x), -kInf};
    v[j + 1].f = safe_eval(f, v[j + 1].x);
  }

  auto better = [](const Vertex& a, const Vertex& b) { return a.f > b.f; };
  std::sort(v.begin(), v.end(), better);
  if (better(v[0], best)) best = v[0];

  converged = false;
  int it = 0;
  for (; it < cfg.max_iters; ++it) {
    const double fspread = v[0].f - v[d].f;
    double xspread = 0.0, xscale = 0.0;
    for (size_t j = 0; j < d; ++j) xscale = std::max(xscale, std::fabs(v[0].x[j]));
    for (size_t k = 1; k <= d; ++k)
      for (size_t j = 0; j < d; ++j)
        xspread = std::max(xspread, std::fabs(v[k].x[j] - v[0].x[j]));
    if (fspread <= cfg.f_tol * (1.0 + std::fabs(v[0].f)) ||
        xspread <= cfg.x_tol * (1.0 + xscale)) {
      converged = true;
      break;
    }

    std::vector<double> c(d, 0.0);  // centroid of all but the worst
    for (size_t k = 0; k < d; ++k)
      for (size_t j = 0; j < d; ++j) c[j] += v[k].x[j] / static_cast<double>(d);

    auto along = [&](double coef) {
      std::vector<double> x(d);
      for (size_t j = 0; j < d; ++j) x[j] = c[j] + coef * (c[j] - v[d].x[j]);
      return x;
    };

    std::vector<double> xr = along(1.0);
    const double fr = safe_eval(f, xr);
    if (fr > v[0].f) {
      std::vector<double> xe = along(2.0);
      const double fe = safe_eval(f, xe);
      if (fe > fr)
        v[d] = {std::move(xe), fe};
      else
        v[d] = {std::move(xr), fr};
    } else if (fr > v[d - 1].f) {
      v[d] = {std::move(xr), fr};
    } else if (fr > v[d].f) {
      std::vector<double> xc = along(0.5);  // outside contraction
      const double fc = safe_eval(f, xc);
      if (fc >= fr) {
        v[d] = {std::move(xc), fc};
      } else {
        for (size_t k = 1; k <= d; ++k) {  // shrink
          for (size_t j = 0; j < d; ++j)
            v[k].x[j] = v[0].x[j] + 0.5 * (v[k].x[j] - v[0].x[j]);
          v[k].f = safe_eval(f, v[k].x);
        }
      }
    } else {
      std::vector<double> xc = along(-0.5);  // inside contraction
      const double fc = safe_eval(f, xc);
      if (fc > v[d].f) {
        v[d] = {std::move(xc), fc};
      } else {
        for (size_t k = 1; k <= d; ++k) {
          for (size_t j = 0; j < d; ++j)
            v[k].x[j] = v[0].x[j] + 0.5 * (v[k].x[j] - v[0].x[j]);
          v[k].f = safe_eval(f, v[k].x);
        }
      }
    }
    std::sort(v.begin(), v.end(), better);
    if (better(v[0], best)) best = v[0];
  }
  return it;
}

}  // namespace

OptimResult maximize(const Objective& f, std::vector<double> start,
                     const OptimConfig& cfg) {
  if (start.empty()) throw std::invalid_argument("maximize: empty start");
  if (cfg.max_iters < 1 || !(cfg.x_tol > 0) || !(cfg.f_tol > 0))
    throw std::invalid_argument("maximize: invalid config");
  const double f0 = f(start);
  if (!std::isfinite(f0))
    throw std::invalid_argument("maximize: objective not finite at start");

  Vertex best{start, f0};
  OptimResult res;
  bool converged = false;
  for (int r = 0; r <= std::max(0, cfg.restarts); ++r)
    res.iterations += nelder_mead(f, best.x, cfg, best, converged);
  res.x = best.x;
  res.value = best.f;
  res.converged = converged;
  return res;
}

double find_root(const std::function<double(double)>& g, double lo, double hi,
                 double tol) {
  if (!(lo < hi) || !(tol > 0)) throw std::invalid_argument("find_root: bad interval");
  double flo = g(lo), fhi = g(hi);
  if (!std::isfinite(flo) || !std::isfinite(fhi))
    throw std::runtime_error("find_root: non-finite endpoint value");
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0) == (fhi > 0))
    throw std::invalid_argument("find_root: no sign change on bracket");
  for (int it = 0; it < 400 && hi - lo > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = g(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::vector<std::vector<double>> numeric_hessian(const Objective& f,
                                                 const std::vector<double>& x0) {
  const size_t d = x0.size();
  std::vector<double> h(d);
  for (size_t j = 0; j < d; ++j) h[j] = 1e-4 * std::max(1.0, std::fabs(x0[j]));

  auto at = [&](std::vector<double> x) { return f(x); };
  const double f0 = at(x0);
  std::vector<std::vector<double>> hess(d, std::vector<double>(d, 0.0));
  for (size_t j = 0; j < d; ++j) {
    std::vector<double> xp = x0, xm = x0;
    xp[j] += h[j];
    xm[j] -= h[j];
    hess[j][j] = (at(xp) - 2.0 * f0 + at(xm)) / (h[j] * h[j]);
    for (size_t k = j + 1; k < d; ++k) {
      std::vector<double> xpp = x0, xpm = x0, xmp = x0, xmm = x0;
      xpp[j] += h[j]; xpp[k] += h[k];
      xpm[j] += h[j]; xpm[k] -= h[k];
      xmp[j] -= h[j]; xmp[k] += h[k];
      xmm[j] -= h[j]; xmm[k] -= h[k];
      hess[j][k] = hess[k][j] =
          (at(xpp) - at(xpm) - at(xmp) + at(xmm)) / (4.0 * h[j] * h[k]);
    }
  }
  for (size_t j = 0; j < d; ++j)
    for (size_t k = 0; k < d; ++k)
      if (!std::isfinite(hess[j][k]))
        throw std::runtime_error("numeric_hessian: non-finite entry at (" +
                                 std::to_string(j) + "," + std::to_string(k) + ")");
  return hess;
}

std::vector<std::vector<double>> spd_inverse(const std::vector<std::vector<double>>& a) {
  const size_t d = a.size();
  std::vector<std::vector<double>> l(d, std::vector<double>(d, 0.0));
  for (size_t j = 0; j < d; ++j) {
    if (a[j].size() != d) throw std::invalid_argument("spd_inverse: not square");
    for (size_t k = 0; k <= j; ++k) {
      double s = a[j][k];
      for (size_t i = 0; i < k; ++i) s -= l[j][i] * l[k][i];
      if (j == k) {
        if (!(s > 0.0) || !std::isfinite(s)) return {};
        l[j][j] = std::sqrt(s);
      } else {
        l[j][k] = s / l[k][k];
      }
    }
  }
  // invert the lower triangle, then inv(A) = L^-T L^-1
  std::vector<std::vector<double>> li(d, std::vector<double>(d, 0.0));
  for (size_t j = 0; j < d; ++j) {
    li[j][j] = 1.0 / l[j][j];
    for (size_t k = j + 1; k < d; ++k) {
      double s = 0.0;
      for (size_t i = j; i < k; ++i) s -= l[k][i] * li[i][j];
      li[k][j] = s / l[k][k];
    }
  }
  std::vector<std::vector<double>> inv(d, std::vector<double>(d, 0.0));
  for (size_t j = 0; j < d; ++j)
    for (size_t k = 0; k <= j; ++k) {
      double s = 0.0;
      for (size_t i = j; i < d; ++i) s += li[i][j] * li[i][k];
      inv[j][k] = inv[k][j] = s;
    }
  return inv;
}

}  // namespace curesem
