#ifndef WPCN_ASYNC_OPT_HPP
#define WPCN_ASYNC_OPT_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "wpcn/dinkelbach.hpp"
#include "wpcn/errors.hpp"
#include "wpcn/model.hpp"
#include "wpcn/numerics.hpp"
#include "wpcn/specfun.hpp"

namespace wpcn {

/// Working state of the sequential recursion. Rate weights are 1 + kappa_i.
struct Pr3bState {
  std::vector<double> z;
  std::vector<double> phi;
  std::vector<double> kappa;
  double zeta = 0.0;
  double lambda = 0.0;
};

/// Z(z) = ln(1 + b z) - b z / (1 + b z).
inline double z_curve(double z, double b) {
  const double bz = b * z;
  return std::log1p(bz) - bz / (1.0 + bz);
}

/// Root z >= 0 of ln w + (1 - beta) / w = phi + 1 with w = 1 + b z, solved by
/// w = q / W(q e^{-phi-1}) with q = beta - 1. beta = b gives the
/// non-overlapping condition, beta = 0 the harvest-only-in-tau0 one.
/// Returns 0 when the root would be negative (phi <= -beta).
inline double stationary_z(double phi, double b, double beta) {
  if (!(b > 0.0)) {
    throw DegenerateError("stationary_z: b must be positive");
  }
  if (phi <= -beta) {
    return 0.0;
  }
  const double q = beta - 1.0;
  double w = 0.0;
  if (q == 0.0) {
    w = std::exp(phi + 1.0);
  } else if (q > 0.0) {
    const double lw = lambert_w0_exp(std::log(q) - phi - 1.0);
    w = lw > 0.0 ? q / lw : std::exp(phi + 1.0);
  } else {
    const double lw = lambert_w0(q * std::exp(-phi - 1.0));
    w = lw < 0.0 ? q / lw : std::exp(phi + 1.0);
  }
  return std::max((w - 1.0) / b, 0.0);
}

/// z_i from phi_i for the non-overlapping scheme: the root of
/// Z(z) - b / (1 + b z) = phi.
inline double z_i(double phi, double b) {
  if (!(b > 0.0)) {
    throw DegenerateError("z_i: b must be positive");
  }
  return stationary_z(phi, b, b);
}

/// phi_i of the recursion (0-based i) with rate weights w = 1 + kappa:
///   i < N-1: lambda P_cU ln2 / w_i + sum_{j<i} (w_j / w_i) b_j / (1 + b_j z_j)
///   i = N-1: lambda (P_cU - P_DT) ln2 / w_i + the same sum.
inline double phi_i(std::size_t i, double lambda, std::span<const double> kappa,
                    std::span<const double> z_prefix, std::span<const double> b,
                    const SystemPowers& powers) {
  const std::size_t n = b.size();
  detail::check_index(i, n, "phi_i");
  if (z_prefix.size() < i || kappa.size() < i + 1) {
    throw DimensionError("phi_i: need z_1..z_{i-1} and kappa_1..kappa_i");
  }
  for (std::size_t j = 0; j <= i; ++j) {
    if (!(kappa[j] >= 0.0)) {
      throw DimensionError("phi_i: kappa entries must be >= 0");
    }
  }
  const double wi = 1.0 + kappa[i];
  const double price = (i + 1 < n) ? powers.p_cu : powers.p_cu - powers.p_dt();
  double phi = lambda * price * kLn2 / wi;
  for (std::size_t j = 0; j < i; ++j) {
    phi += (1.0 + kappa[j]) / wi * b[j] / (1.0 + b[j] * z_prefix[j]);
  }
  return phi;
}

/// Backward recovery of a full-block allocation from z_k = prefix_k / tau_k.
/// The time left before slot i, 1 - sum_{j>i} tau_j, is carried as a product
/// so that tau0 never comes from a cancelling subtraction.
inline TimeAllocation recover_taus(std::span<const double> z) {
  TimeAllocation alloc;
  const std::size_t n = z.size();
  alloc.tau.assign(n, 0.0);
  double before = 1.0;
  for (std::size_t i = n; i-- > 0;) {
    if (!(z[i] >= 0.0)) {
      throw DegenerateError("recover_taus: z entries must be nonnegative");
    }
    alloc.tau[i] = before / (1.0 + z[i]);
    before *= std::isinf(z[i]) ? 1.0 : z[i] / (1.0 + z[i]);
  }
  alloc.tau0 = before;
  return alloc;
}

/// Forward recursion for fixed (lambda, kappa): phi_1, z_1, ..., phi_N, z_N.
inline Pr3bState pr3b_recursion(double lambda, std::span<const double> kappa,
                                const Coefficients& c, const SystemPowers& powers) {
  const std::size_t n = c.size();
  Pr3bState st;
  st.lambda = lambda;
  st.kappa.assign(kappa.begin(), kappa.end());
  st.z.reserve(n);
  st.phi.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double phi = phi_i(i, lambda, kappa, st.z, c.b, powers);
    st.phi.push_back(phi);
    st.z.push_back(z_i(phi, c.b[i]));
  }
  return st;
}

/// Stationarity residuals (log2 units) of the non-overlapping Lagrangian with
/// respect to tau0 and tau_1..tau_{N-1}, after eliminating the time-budget
/// multiplier zeta from the tau_N condition. Returns {zeta, r_0, ..., r_{N-1}}.
inline std::vector<double> kkt_residuals_pr3b(const TimeAllocation& alloc, const Coefficients& c,
                                              const SystemPowers& powers, double lambda,
                                              std::span<const double> kappa) {
  const std::size_t n = c.size();
  std::vector<double> z(n);
  std::vector<double> marginal(n);  // w_k b_k / (ln2 (1 + b_k z_k))
  std::vector<double> own(n);       // w_k Z_k(z_k) / ln2
  for (std::size_t k = 0; k < n; ++k) {
    const double w = 1.0 + (kappa.empty() ? 0.0 : kappa[k]);
    z[k] = detail::harvest_prefix(k, alloc) / alloc.tau[k];
    marginal[k] = w * c.b[k] / (kLn2 * (1.0 + c.b[k] * z[k]));
    own[k] = w * z_curve(z[k], c.b[k]) / kLn2;
  }
  const double pdt = powers.p_dt();
  const double zeta = own[n - 1] - lambda * powers.p_cu;
  std::vector<double> out{zeta};
  double all = 0.0;
  for (double m : marginal) {
    all += m;
  }
  out.push_back(all - lambda * pdt - zeta);
  double later = all;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    later -= marginal[i];
    out.push_back(later + own[i] - lambda * (pdt + powers.p_cu) - zeta);
  }
  return out;
}

namespace detail {

inline constexpr double kKappaCap = 1e6;
inline constexpr double kRateTol = 1e-10;

/// A Dinkelbach problem with per-user rate floors handled through dual
/// weights 1 + kappa_i on the rates.
struct FloorProblem {
  std::size_t n = 0;
  std::function<TimeAllocation(double, std::span<const double>)> inner;
  std::function<double(std::size_t, const TimeAllocation&)> rate;
  std::function<double(const TimeAllocation&)> energy;
};

inline double total_rate(const FloorProblem& p, const TimeAllocation& alloc) {
  double r = 0.0;
  for (std::size_t i = 0; i < p.n; ++i) {
    r += p.rate(i, alloc);
  }
  return r;
}

/// Maximizes min_i (R_i - r_min_i) over users with a positive floor on the full block with a softmin
/// continuation; returns the true min at the final point.
inline double feasibility_margin(const FloorProblem& p, const RateConstraints& rmin) {
  const std::size_t dim = p.n + 1;
  auto to_alloc = [&](const std::vector<double>& x) {
    TimeAllocation a;
    a.tau0 = x[0];
    a.tau.assign(x.begin() + 1, x.end());
    return a;
  };
  auto margin = [&](const std::vector<double>& x) {
    const TimeAllocation a = to_alloc(x);
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < p.n; ++i) {
      if (rmin.at(i) > 0.0) {
        m = std::min(m, p.rate(i, a) - rmin.at(i));
      }
    }
    return m;
  };
  std::vector<double> x(dim, 1.0 / static_cast<double>(dim));
  for (double beta : {10.0, 100.0, 1e3, 1e4}) {
    auto soft = [&](const std::vector<double>& y) {
      const TimeAllocation a = to_alloc(y);
      std::vector<double> m;
      double lo = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < p.n; ++i) {
        if (rmin.at(i) > 0.0) {
          m.push_back(p.rate(i, a) - rmin.at(i));
          lo = std::min(lo, m.back());
        }
      }
      double s = 0.0;
      for (double v : m) {
        s += std::exp(-beta * (v - lo));
      }
      return lo - std::log(s) / beta;
    };
    auto grad = [&](const std::vector<double>& y) {
      std::vector<double> g(dim);
      std::vector<double> yp = y;
      for (std::size_t k = 0; k < dim; ++k) {
        const double h = 1e-7;
        yp[k] = y[k] + h;
        const double up = soft(yp);
        yp[k] = y[k] - h;
        const double dn = soft(yp);
        yp[k] = y[k];
        g[k] = (up - dn) / (2.0 * h);
      }
      return g;
    };
    auto project = [](const std::vector<double>& y) {
      return numerics::project_capped_simplex(y, 1.0, 1e-9);
    };
    numerics::PgConfig pg;
    pg.tol = 1e-9;
    pg.max_iters = 2000;
    x = numerics::projected_gradient_ascent(soft, grad, project, x, pg).x;
    // the capped projection may leave slack; hand it to tau0
    double s = 0.0;
    for (std::size_t k = 1; k < dim; ++k) {
      s += x[k];
    }
    x[0] = 1.0 - s;
  }
  return margin(x);
}

struct FloorSolve {
  TimeAllocation alloc;
  std::vector<double> kappa;
};

/// For fixed lambda, adjusts kappa by cyclic coordinate bisection until every
/// floor holds and complementary slackness is met.
inline FloorSolve solve_dual(const FloorProblem& p, const RateConstraints& rmin, double lambda,
                             std::vector<double> kappa) {
  auto alloc_at = [&](const std::vector<double>& k) { return p.inner(lambda, k); };
  for (int sweep = 0; sweep < 200; ++sweep) {
    bool moved = false;
    for (std::size_t i = 0; i < p.n; ++i) {
      const double target = rmin.at(i);
      if (!(target > 0.0) && kappa[i] == 0.0) {
        continue;
      }
      auto gap = [&](double ki) {
        std::vector<double> k = kappa;
        k[i] = ki;
        return p.rate(i, alloc_at(k)) - target;
      };
      const double g0 = gap(kappa[i]);
      if (g0 < -kRateTol) {
        double lo = kappa[i];
        double hi = std::max(2.0 * kappa[i], 1.0);
        while (gap(hi) < 0.0) {
          lo = hi;
          hi *= 4.0;
          if (hi > kKappaCap) {
            throw InfeasibleRates("rate floor of user " + std::to_string(i + 1) +
                                  " cannot be met (dual weight diverged)");
          }
        }
        kappa[i] = numerics::bisect(gap, lo, hi, 1e-13 * (1.0 + hi), 300);
        if (gap(kappa[i]) < 0.0) {
          kappa[i] = hi;
        }
        moved = true;
      } else if (kappa[i] > 0.0 && g0 > kRateTol) {
        kappa[i] = gap(0.0) >= 0.0 ? 0.0 : numerics::bisect(gap, 0.0, kappa[i], 1e-13, 300);
        moved = true;
      }
    }
    if (!moved) {
      break;
    }
  }
  FloorSolve out;
  out.alloc = alloc_at(kappa);
  out.kappa = std::move(kappa);
  return out;
}

/// Dinkelbach over a FloorProblem; kappa is warm-started across lambda steps.
inline OptResult solve_with_floors(const FloorProblem& p, const RateConstraints& rmin,
                                   const DinkelbachConfig& cfg) {
  rmin.validate(p.n);
  const bool floors = rmin.active();
  if (floors && feasibility_margin(p, rmin) < -std::log(static_cast<double>(p.n)) * 1e-4 - 1e-9) {
    throw InfeasibleRates("no allocation meets all rate floors");
  }
  std::vector<double> kappa(p.n, 0.0);
  auto outcome = dinkelbach(
      [&](double lambda) {
        Candidate cand;
        if (floors) {
          FloorSolve fs = solve_dual(p, rmin, lambda, kappa);
          kappa = std::move(fs.kappa);
          cand.alloc = std::move(fs.alloc);
        } else {
          cand.alloc = p.inner(lambda, kappa);
        }
        cand.rate = total_rate(p, cand.alloc);
        cand.energy = p.energy(cand.alloc);
        return cand;
      },
      cfg);
  OptResult res;
  res.alloc = std::move(outcome.best.alloc);
  res.ee = outcome.lambda;
  res.rates.resize(p.n);
  for (std::size_t i = 0; i < p.n; ++i) {
    res.rates[i] = p.rate(i, res.alloc);
  }
  res.trace = std::move(outcome.trace);
  res.converged = outcome.converged;
  res.duals["lambda"] = res.trace.back().lambda;
  res.duals["mu"] = 0.0;
  for (std::size_t i = 0; i < p.n; ++i) {
    res.duals["kappa_" + std::to_string(i + 1)] = kappa[i];
  }
  return res;
}

inline void require_positive_b(const Coefficients& c, const char* what) {
  for (double b : c.b) {
    if (!(b > 0.0)) {
      throw DegenerateError(std::string(what) + ": every b_i must be positive");
    }
  }
}

}  // namespace detail

/// Energy-efficient non-overlapping asynchronous allocation with optional
/// per-user rate floors (sequential phi/z recursion inside Dinkelbach).
inline OptResult solve_pr3b(const Coefficients& c, const SystemPowers& powers,
                            const RateConstraints& rmin = {}, const DinkelbachConfig& cfg = {}) {
  detail::require_positive_b(c, "solve_pr3b");
  detail::FloorProblem p;
  p.n = c.size();
  p.inner = [&](double lambda, std::span<const double> kappa) {
    return recover_taus(pr3b_recursion(lambda, kappa, c, powers).z);
  };
  p.rate = [&](std::size_t i, const TimeAllocation& a) { return rate_tdma_user(i, a, c); };
  p.energy = [&](const TimeAllocation& a) {
    return energy_total(Mode::asynchronous, a, powers);
  };
  OptResult res = detail::solve_with_floors(p, rmin, cfg);
  std::vector<double> kappa(p.n);
  for (std::size_t i = 0; i < p.n; ++i) {
    kappa[i] = res.duals["kappa_" + std::to_string(i + 1)];
  }
  res.duals["zeta"] =
      kkt_residuals_pr3b(res.alloc, c, powers, res.duals["lambda"], kappa).front();
  return res;
}

namespace detail {

/// Sum rate of the overlapping scheme on a full block as a function of
/// x = (tau_1..tau_N), with its gradient (log2 units).
struct OverlapRate {
  const Coefficients& c;

  double value(const std::vector<double>& x) const {
    const std::size_t n = x.size();
    double r = 0.0;
    double acc = 0.0;
    double span = std::accumulate(x.begin(), x.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      acc += c.b[i] * (1.0 - span) / span;
      if (x[i] > 0.0) {
        r += x[i] * std::log1p(acc);
      }
      span -= x[i];
    }
    return r / kLn2;
  }

  std::vector<double> gradient(const std::vector<double>& x) const {
    const std::size_t n = x.size();
    std::vector<double> spans(n);
    double s = 0.0;
    for (std::size_t i = n; i-- > 0;) {
      s += x[i];
      spans[i] = s;
    }
    std::vector<double> g(n, 0.0);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      acc += c.b[i] * (1.0 - spans[i]) / spans[i];
      const double u = 1.0 + acc;
      g[i] += std::log(u);
      double cum = 0.0;
      for (std::size_t m = 0; m < n; ++m) {
        if (m <= i) {
          cum += c.b[m] / (spans[m] * spans[m]);
        }
        g[m] -= x[i] * cum / u;
      }
    }
    for (double& v : g) {
      v /= kLn2;
    }
    return g;
  }
};

}  // namespace detail

/// Energy-efficient overlapping asynchronous allocation for up to two users.
/// `pcu_per_interval` defaults to interval_circuit_powers (i active decoders
/// in interval i).
inline OptResult solve_pr3a(const Coefficients& c, const SystemPowers& powers,
                            const DinkelbachConfig& cfg = {},
                            std::vector<double> pcu_per_interval = {}) {
  const std::size_t n = c.size();
  if (n > 2) {
    throw DimensionError("solve_pr3a: supports one or two users");
  }
  double bsum = 0.0;
  for (double b : c.b) {
    if (!(b >= 0.0)) {
      throw DegenerateError("solve_pr3a: b_i must be nonnegative");
    }
    bsum += b;
  }
  if (!(bsum > 0.0)) {
    throw DegenerateError("solve_pr3a: at least one b_i must be positive");
  }
  if (pcu_per_interval.empty()) {
    pcu_per_interval = interval_circuit_powers(powers, n);
  }
  if (pcu_per_interval.size() != n) {
    throw DimensionError("solve_pr3a: one circuit power per interval required");
  }
  const double pdt = powers.p_dt();
  const detail::OverlapRate rate{c};
  auto energy = [&](const std::vector<double>& x) {
    double e = pdt * (1.0 - x[n - 1]);
    for (std::size_t i = 0; i < n; ++i) {
      e += x[i] * pcu_per_interval[i];
    }
    return e;
  };
  auto to_alloc = [&](const std::vector<double>& x) {
    TimeAllocation a;
    a.tau = x;
    a.tau0 = std::max(1.0 - std::accumulate(x.begin(), x.end(), 0.0), 0.0);
    return a;
  };
  constexpr double kFloor = 1e-12;
  auto project = [&](const std::vector<double>& y) {
    return numerics::project_capped_simplex(y, 1.0 - kFloor, kFloor);
  };
  std::vector<double> x(n, 1.0 / static_cast<double>(n + 1));
  auto outcome = dinkelbach(
      [&](double lambda) {
        auto f = [&](const std::vector<double>& y) { return rate.value(y) - lambda * energy(y); };
        auto grad = [&](const std::vector<double>& y) {
          std::vector<double> g = rate.gradient(y);
          for (std::size_t m = 0; m < n; ++m) {
            g[m] -= lambda * pcu_per_interval[m];
          }
          g[n - 1] += lambda * pdt;
          return g;
        };
        numerics::PgConfig pg;
        pg.tol = 1e-10;
        pg.max_iters = 50000;
        x = numerics::projected_gradient_ascent(f, grad, project, x, pg).x;
        Candidate cand;
        cand.alloc = to_alloc(x);
        cand.rate = rate.value(x);
        cand.energy = energy(x);
        return cand;
      },
      cfg);
  OptResult res;
  res.alloc = std::move(outcome.best.alloc);
  res.ee = outcome.lambda;
  res.rates.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    res.rates[j] = rate_at_user(j, res.alloc, c);
  }
  res.trace = std::move(outcome.trace);
  res.converged = outcome.converged;
  res.duals["lambda"] = res.trace.back().lambda;
  res.duals["mu"] = 0.0;
  return res;
}

}  // namespace wpcn

#endif  // WPCN_ASYNC_OPT_HPP
