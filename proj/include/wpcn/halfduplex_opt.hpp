#ifndef WPCN_HALFDUPLEX_OPT_HPP
#define WPCN_HALFDUPLEX_OPT_HPP

#include <algorithm>
#include <cmath>
#include <numbers>

#include "wpcn/dinkelbach.hpp"
#include "wpcn/errors.hpp"
#include "wpcn/model.hpp"
#include "wpcn/numerics.hpp"
#include "wpcn/specfun.hpp"

namespace wpcn {

inline constexpr double kTau0Clip = 1e-9;

/// Dinkelbach inner objective for half-duplex operation:
/// R_sum(tau0) - lambda * (tau0 * P_delta + P_cD).
inline double lagrangian_hd(double tau0, double lambda, const Coefficients& c,
                            const SystemPowers& powers) {
  return rate_hd_sum(tau0, c) - lambda * (tau0 * powers.p_delta() + powers.p_cd);
}

/// First-order condition of the inner problem in natural-log units; zero at
/// an interior maximizer.
inline double stationarity_residual_hd(double tau0, double lambda, const Coefficients& c,
                                       const SystemPowers& powers) {
  const double at = c.alpha_t;
  return at / (1.0 - tau0 + at * tau0) - std::log1p(at * tau0 / (1.0 - tau0)) -
         kLn2 * lambda * powers.p_delta();
}

/// Maximizer of lagrangian_hd over tau0 in [0, 1] through Lambert W:
/// tau0 = (a' - W(a' e^{lambda P' - 1})) / (a' (1 + W(...))), clipped to [0, 1].
inline double tau0_closed_form(double lambda, const Coefficients& c, const SystemPowers& powers) {
  const double ap = c.alpha_prime;
  if (std::abs(ap) < 1e-12) {
    throw AlphaDegenerate("tau0_closed_form: alpha_T is too close to one");
  }
  const double omega = lambda * powers.p_prime() - 1.0;
  double w = 0.0;
  if (ap > 0.0) {
    w = lambert_w0_exp(std::log(ap) + omega);
  } else {
    w = lambert_w0(ap * std::exp(omega));
  }
  const double tau0 = (ap - w) / (ap * (1.0 + w));
  if (std::isnan(tau0)) {
    return 1.0;
  }
  return std::clamp(tau0, 0.0, 1.0);
}

namespace detail {

/// The principal-branch root is the feasible one when alpha' > 0, or when
/// alpha' < 0 with Omega >= -1 and the argument in domain.
inline bool closed_form_applies(double lambda, const Coefficients& c, const SystemPowers& powers) {
  const double ap = c.alpha_prime;
  if (ap > 1e-12) {
    return true;
  }
  if (ap < -1e-12 && powers.p_prime() >= 0.0) {
    const double omega = lambda * powers.p_prime() - 1.0;
    return ap * std::exp(omega) >= -1.0 / std::numbers::e;
  }
  return false;
}

inline double inner_hd(double lambda, const Coefficients& c, const SystemPowers& powers) {
  double tau0 = 0.0;
  if (closed_form_applies(lambda, c, powers)) {
    tau0 = tau0_closed_form(lambda, c, powers);
  } else {
    tau0 = numerics::golden_section_max(
        [&](double t) { return lagrangian_hd(t, lambda, c, powers); }, 0.0, 1.0, 1e-12);
  }
  return std::clamp(tau0, kTau0Clip, 1.0 - kTau0Clip);
}

inline void check_hd_inputs(const Coefficients& c, const SystemPowers& powers) {
  if (!(c.alpha_t > 0.0)) {
    throw DegenerateError("half-duplex: alpha_T must be positive");
  }
  if (!(powers.p_cd > 0.0 || powers.p_cu > 0.0)) {
    throw DegenerateError("half-duplex: need p_cd > 0 or p_cu > 0");
  }
}

inline OptResult hd_result(double tau0, const Coefficients& c, const SystemPowers& powers) {
  OptResult res;
  res.alloc.tau0 = tau0;
  res.alloc.tau = {1.0 - tau0};
  res.ee = ee_hd(tau0, c, powers);
  res.rates.resize(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    res.rates[i] = rate_hd_user(i, tau0, c);
  }
  return res;
}

}  // namespace detail

/// Energy-efficiency maximization for half-duplex NOMA (Dinkelbach with the
/// Lambert-W inner solution).
inline OptResult solve_pr1(const Coefficients& c, const SystemPowers& powers,
                           const DinkelbachConfig& cfg = {}) {
  detail::check_hd_inputs(c, powers);
  auto outcome = dinkelbach(
      [&](double lambda) {
        Candidate cand;
        const double tau0 = detail::inner_hd(lambda, c, powers);
        cand.alloc.tau0 = tau0;
        cand.alloc.tau = {1.0 - tau0};
        cand.rate = rate_hd_sum(tau0, c);
        cand.energy = energy_total(Mode::half_duplex, cand.alloc, powers);
        return cand;
      },
      cfg);
  OptResult res = detail::hd_result(outcome.best.alloc.tau0, c, powers);
  res.ee = outcome.lambda;
  res.trace = std::move(outcome.trace);
  res.converged = outcome.converged;
  res.duals["lambda"] = res.trace.back().lambda;
  res.duals["mu"] = 0.0;
  res.duals["kappa"] = 0.0;
  return res;
}

/// Throughput-maximizing harvesting time (sum rate is concave in tau0).
inline double solve_throughput_hd(const Coefficients& c) {
  if (!(c.alpha_t > 0.0)) {
    throw DegenerateError("solve_throughput_hd: alpha_T must be positive");
  }
  return numerics::golden_section_max([&](double t) { return rate_hd_sum(t, c); }, 0.0, 1.0,
                                      1e-9);
}

}  // namespace wpcn

#endif  // WPCN_HALFDUPLEX_OPT_HPP
