#ifndef WPCN_NUMERICS_HPP
#define WPCN_NUMERICS_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

namespace wpcn::numerics {

/// Golden-section search for the maximizer of a unimodal f on [lo, hi].
template <class F>
double golden_section_max(F&& f, double lo, double hi, double tol = 1e-9, int max_iters = 500) {
  constexpr double inv_phi = 0.6180339887498949;
  double c = hi - inv_phi * (hi - lo);
  double d = lo + inv_phi * (hi - lo);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < max_iters && (hi - lo) > tol; ++it) {
    if (fc >= fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = f(d);
    }
  }
  // the bracket midpoint can lose to an endpoint when the max sits on the boundary
  const double mid = 0.5 * (lo + hi);
  double best = mid;
  double fbest = f(mid);
  for (double x : {lo, hi}) {
    const double fx = f(x);
    if (fx > fbest) {
      best = x;
      fbest = fx;
    }
  }
  return best;
}

/// Bisection for a sign change of g on [lo, hi]; g(lo) and g(hi) must differ
/// in sign (or one endpoint is returned).
template <class G>
double bisect(G&& g, double lo, double hi, double tol = 1e-12, int max_iters = 200) {
  double glo = g(lo);
  const double ghi = g(hi);
  if (glo == 0.0) {
    return lo;
  }
  if (ghi == 0.0) {
    return hi;
  }
  if ((glo > 0.0) == (ghi > 0.0)) {
    return std::abs(glo) < std::abs(ghi) ? lo : hi;
  }
  for (int it = 0; it < max_iters && (hi - lo) > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double gm = g(mid);
    if (gm == 0.0) {
      return mid;
    }
    if ((gm > 0.0) == (glo > 0.0)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Euclidean projection onto the probability simplex {x >= 0, sum x = total}.
inline std::vector<double> project_simplex(const std::vector<double>& v, double total = 1.0) {
  std::vector<double> u = v;
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumsum = 0.0;
  double theta = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    cumsum += u[k];
    const double t = (cumsum - total) / static_cast<double>(k + 1);
    if (u[k] - t > 0.0) {
      theta = t;
    }
  }
  std::vector<double> out(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) {
    out[k] = std::max(v[k] - theta, 0.0);
  }
  return out;
}

/// Euclidean projection onto {x >= lower, sum x <= cap}.
inline std::vector<double> project_capped_simplex(const std::vector<double>& v, double cap = 1.0,
                                                  double lower = 0.0) {
  std::vector<double> shifted(v.size());
  double sum = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    shifted[k] = std::max(v[k] - lower, 0.0);
    sum += shifted[k];
  }
  const double room = cap - lower * static_cast<double>(v.size());
  if (sum > room) {
    std::vector<double> raw(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) {
      raw[k] = v[k] - lower;
    }
    shifted = project_simplex(raw, room);
  }
  for (double& x : shifted) {
    x += lower;
  }
  return shifted;
}

struct PgConfig {
  double tol = 1e-7;      ///< on the norm of x - P(x + grad)
  int max_iters = 20000;
  double sufficient = 1e-4;  ///< Armijo constant
  double shrink = 0.5;
};

struct PgResult {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Projected gradient ascent with Armijo backtracking along the projection arc.
template <class F, class Grad, class Project>
PgResult projected_gradient_ascent(F&& f, Grad&& grad, Project&& project, std::vector<double> x0,
                                   const PgConfig& cfg = {}) {
  PgResult res;
  res.x = project(x0);
  res.value = f(res.x);
  double step = 1.0;
  const std::size_t n = res.x.size();
  std::vector<double> trial(n);
  for (int it = 0; it < cfg.max_iters; ++it) {
    res.iterations = it + 1;
    const std::vector<double> g = grad(res.x);
    for (std::size_t k = 0; k < n; ++k) {
      trial[k] = res.x[k] + g[k];
    }
    const std::vector<double> unit = project(trial);
    double pg_norm = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      pg_norm += (unit[k] - res.x[k]) * (unit[k] - res.x[k]);
    }
    if (std::sqrt(pg_norm) <= cfg.tol) {
      res.converged = true;
      break;
    }
    step = std::min(step * 4.0, 1e6);
    bool accepted = false;
    for (int bt = 0; bt < 80; ++bt) {
      for (std::size_t k = 0; k < n; ++k) {
        trial[k] = res.x[k] + step * g[k];
      }
      std::vector<double> cand = project(trial);
      double ascent = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        ascent += g[k] * (cand[k] - res.x[k]);
      }
      const double fc = f(cand);
      if (fc >= res.value + cfg.sufficient * ascent) {
        res.x = std::move(cand);
        res.value = fc;
        accepted = true;
        break;
      }
      step *= cfg.shrink;
    }
    if (!accepted) {
      // no ascent left at machine precision
      res.converged = true;
      break;
    }
  }
  return res;
}

struct NewtonConfig {
  double tol = 1e-9;   ///< on the norm of x - P(x + grad)
  int max_iters = 200;
  double fd_step = 1e-5;
  double lower = 0.0;  ///< coordinates stay above this when differencing
};

namespace detail {

/// Solves (-H) d = g for symmetric H by Cholesky; false if -H is not
/// positive definite.
inline bool newton_direction(std::vector<double> h, std::vector<double> g, std::size_t n,
                             std::vector<double>& d) {
  for (double& v : h) {
    v = -v;
  }
  for (std::size_t j = 0; j < n; ++j) {
    double diag = h[j * n + j];
    for (std::size_t k = 0; k < j; ++k) {
      diag -= h[j * n + k] * h[j * n + k];
    }
    if (!(diag > 0.0)) {
      return false;
    }
    h[j * n + j] = std::sqrt(diag);
    for (std::size_t i = j + 1; i < n; ++i) {
      double v = h[i * n + j];
      for (std::size_t k = 0; k < j; ++k) {
        v -= h[i * n + k] * h[j * n + k];
      }
      h[i * n + j] = v / h[j * n + j];
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < i; ++k) {
      g[i] -= h[i * n + k] * g[k];
    }
    g[i] /= h[i * n + i];
  }
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t k = i + 1; k < n; ++k) {
      g[i] -= h[k * n + i] * g[k];
    }
    g[i] /= h[i * n + i];
  }
  d = std::move(g);
  return true;
}

}  // namespace detail

/// Projected Newton ascent with finite-difference derivatives. Each step
/// tries the Newton direction and falls back to a projected gradient step;
/// both use Armijo backtracking along the projection arc. Difference steps
/// shrink near cfg.lower and near the simplex face sum x = 1.
template <class F, class Project>
PgResult projected_newton_ascent(F&& f, Project&& project, std::vector<double> x0,
                                 const NewtonConfig& cfg = {}) {
  PgResult res;
  res.x = project(x0);
  res.value = f(res.x);
  const std::size_t n = res.x.size();
  auto steps = [&](const std::vector<double>& x) {
    double slack = 1.0 - std::accumulate(x.begin(), x.end(), 0.0);
    std::vector<double> h(n);
    for (std::size_t k = 0; k < n; ++k) {
      h[k] = std::min({cfg.fd_step, 0.5 * (x[k] - cfg.lower), 0.25 * slack});
    }
    return h;
  };
  for (int it = 0; it < cfg.max_iters; ++it) {
    res.iterations = it + 1;
    const std::vector<double> h = steps(res.x);
    std::vector<double> g(n);
    std::vector<double> hess(n * n);
    std::vector<double> y = res.x;
    std::vector<double> fp(n);
    std::vector<double> fm(n);
    for (std::size_t k = 0; k < n; ++k) {
      y[k] = res.x[k] + h[k];
      fp[k] = f(y);
      y[k] = res.x[k] - h[k];
      fm[k] = f(y);
      y[k] = res.x[k];
      g[k] = (fp[k] - fm[k]) / (2.0 * h[k]);
      hess[k * n + k] = (fp[k] - 2.0 * res.value + fm[k]) / (h[k] * h[k]);
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        double acc = 0.0;
        for (int si : {1, -1}) {
          for (int sj : {1, -1}) {
            y[i] = res.x[i] + si * h[i];
            y[j] = res.x[j] + sj * h[j];
            acc += si * sj * f(y);
          }
        }
        y[i] = res.x[i];
        y[j] = res.x[j];
        hess[i * n + j] = hess[j * n + i] = acc / (4.0 * h[i] * h[j]);
      }
    }
    std::vector<double> trial(n);
    for (std::size_t k = 0; k < n; ++k) {
      trial[k] = res.x[k] + g[k];
    }
    const std::vector<double> unit = project(trial);
    double pg_norm = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      pg_norm += (unit[k] - res.x[k]) * (unit[k] - res.x[k]);
    }
    if (std::sqrt(pg_norm) <= cfg.tol) {
      res.converged = true;
      break;
    }
    auto line_search = [&](const std::vector<double>& dir, double step) {
      for (int bt = 0; bt < 60; ++bt) {
        for (std::size_t k = 0; k < n; ++k) {
          trial[k] = res.x[k] + step * dir[k];
        }
        std::vector<double> cand = project(trial);
        double ascent = 0.0;
        double moved = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          ascent += g[k] * (cand[k] - res.x[k]);
          moved += std::abs(cand[k] - res.x[k]);
        }
        if (moved == 0.0) {
          return false;
        }
        const double fc = f(cand);
        if (ascent > 0.0 && fc >= res.value + 1e-4 * ascent) {
          res.x = std::move(cand);
          res.value = fc;
          return true;
        }
        step *= 0.5;
      }
      return false;
    };
    std::vector<double> dir;
    bool accepted = detail::newton_direction(hess, g, n, dir) && line_search(dir, 1.0);
    if (!accepted) {
      double gnorm = 0.0;
      for (double v : g) {
        gnorm += v * v;
      }
      accepted = line_search(g, 1.0 / std::max(std::sqrt(gnorm), 1e-12));
    }
    if (!accepted) {
      res.converged = true;
      break;
    }
  }
  return res;
}

}  // namespace wpcn::numerics

#endif  // WPCN_NUMERICS_HPP
