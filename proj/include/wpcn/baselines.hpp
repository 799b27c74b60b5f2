#ifndef WPCN_BASELINES_HPP
#define WPCN_BASELINES_HPP

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "wpcn/async_opt.hpp"
#include "wpcn/dinkelbach.hpp"
#include "wpcn/halfduplex_opt.hpp"
#include "wpcn/model.hpp"

namespace wpcn {

/// Throughput-maximizing half-duplex allocation, scored by its EE.
inline OptResult case2_hd(const Coefficients& c, const SystemPowers& powers) {
  detail::check_hd_inputs(c, powers);
  OptResult res = detail::hd_result(solve_throughput_hd(c), c, powers);
  res.converged = true;
  return res;
}

namespace detail {

/// Inner maximizer of sum_k w_k R_k - lambda E for half-duplex TDMA (energy
/// harvested only during tau0). All slots share one multiplier psi with
/// w_k Z(z_k) = psi, z_k = tau0 / tau_k; psi solves
/// psi = sum_k w_k b_k / (1 + b_k z_k) - lambda ln2 (P_DT - P_cU).
inline TimeAllocation tdma_hd_inner(double lambda, std::span<const double> kappa,
                                    const Coefficients& c, const SystemPowers& powers) {
  const std::size_t n = c.size();
  const double price = lambda * kLn2 * (powers.p_dt() - powers.p_cu);
  std::vector<double> z(n);
  auto eval = [&](double psi, double& slope) {
    double h = psi + price;
    slope = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double w = 1.0 + kappa[k];
      z[k] = std::max(stationary_z(psi / w, c.b[k], 0.0), 1e-300);
      h -= w * c.b[k] / (1.0 + c.b[k] * z[k]);
      slope += 1.0 / z[k];
    }
    return h;
  };
  double slope = 0.0;
  double lo = 0.0;
  double hi = 1.0;
  while (eval(hi, slope) < 0.0) {
    lo = hi;
    hi *= 2.0;
  }
  double psi = hi;
  double h = eval(psi, slope);
  for (int it = 0; it < 200; ++it) {
    if (h > 0.0) {
      hi = psi;
    } else {
      lo = psi;
    }
    double next = psi - h / slope;
    if (!(next > lo && next < hi)) {
      next = 0.5 * (lo + hi);
    }
    const bool done = std::abs(next - psi) <= 1e-15 * (1.0 + psi) || hi - lo <= 1e-300;
    psi = next;
    h = eval(psi, slope);
    if (done || h == 0.0) {
      break;
    }
  }
  double inv = 0.0;
  for (double zk : z) {
    inv += 1.0 / zk;
  }
  TimeAllocation alloc;
  alloc.tau0 = 1.0 / (1.0 + inv);
  alloc.tau.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    alloc.tau[k] = alloc.tau0 / z[k];
  }
  return alloc;
}

}  // namespace detail

/// Energy-efficient half-duplex TDMA: harvesting only during tau0, users in
/// disjoint uplink slots, optional rate floors.
inline OptResult case3_tdma(const Coefficients& c, const SystemPowers& powers,
                            const RateConstraints& rmin = {}, const DinkelbachConfig& cfg = {}) {
  detail::require_positive_b(c, "case3_tdma");
  detail::FloorProblem p;
  p.n = c.size();
  p.inner = [&](double lambda, std::span<const double> kappa) {
    return detail::tdma_hd_inner(lambda, kappa, c, powers);
  };
  p.rate = [&](std::size_t i, const TimeAllocation& a) { return rate_tdma_hd_user(i, a, c); };
  p.energy = [&](const TimeAllocation& a) { return energy_tdma_hd(a, powers); };
  return detail::solve_with_floors(p, rmin, cfg);
}

}  // namespace wpcn

#endif  // WPCN_BASELINES_HPP
