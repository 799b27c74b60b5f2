#ifndef WPCN_MODEL_HPP
#define WPCN_MODEL_HPP

#include <cmath>
#include <cstddef>
#include <numbers>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "wpcn/channel.hpp"
#include "wpcn/errors.hpp"

namespace wpcn {

inline constexpr double kLn2 = std::numbers::ln2;

/// Power budget in linear watts. xi holds the per-user fraction of harvested
/// energy spent on transmission; an empty vector means xi_i = 1 for all users.
struct SystemPowers {
  double p_a = 0.0;   ///< downlink (WPT) transmit power
  double p_cd = 0.0;  ///< WPT circuit power
  double p_cu = 0.0;  ///< AP decoding circuit power, per active uplink
  std::vector<double> xi;

  double p_dt() const { return p_cd + p_a; }
  double p_delta() const { return p_dt() - p_cu; }
  double p_prime() const { return kLn2 * p_delta(); }
  double xi_at(std::size_t i) const { return xi.empty() ? 1.0 : xi[i]; }

  void validate(std::size_t n_users) const {
    if (!(p_a >= 0.0) || !(p_cd >= 0.0) || !(p_cu >= 0.0)) {
      throw DimensionError("SystemPowers: powers must be nonnegative");
    }
    if (p_a == 0.0 && p_cd != 0.0) {
      throw DimensionError("SystemPowers: p_cd must be zero when p_a is zero");
    }
    if (!xi.empty()) {
      if (xi.size() != n_users) {
        throw DimensionError("SystemPowers: xi has " + std::to_string(xi.size()) +
                             " entries for " + std::to_string(n_users) + " users");
      }
      for (double x : xi) {
        if (!(x > 0.0 && x <= 1.0)) {
          throw DimensionError("SystemPowers: xi entries must lie in (0, 1]");
        }
      }
    }
  }

  /// Copy with xi reindexed so that entry k belongs to original user perm[k].
  SystemPowers permuted(std::span<const std::size_t> perm) const {
    SystemPowers out = *this;
    if (!xi.empty()) {
      for (std::size_t k = 0; k < perm.size(); ++k) {
        out.xi[k] = xi[perm[k]];
      }
    }
    return out;
  }
};

/// Harvesting interval tau0 and uplink intervals tau_1..tau_N in a block of
/// unit length.
struct TimeAllocation {
  double tau0 = 0.0;
  std::vector<double> tau;

  double total() const { return tau0 + std::accumulate(tau.begin(), tau.end(), 0.0); }
  double uplink() const { return std::accumulate(tau.begin(), tau.end(), 0.0); }

  bool feasible(double tol = 1e-12) const {
    if (!(tau0 >= -tol && tau0 <= 1.0 + tol)) {
      return false;
    }
    for (double t : tau) {
      if (!(t >= -tol)) {
        return false;
      }
    }
    return total() <= 1.0 + tol;
  }
};

enum class Mode { half_duplex, asynchronous };

/// Per-user SNR products of one ordered realization.
///
/// alpha_i = b_i = xi_i |g_i|^2 |h_i|^2 P_a. The half-duplex quantities
/// (alpha, omega) and the asynchronous ones (b, a) are kept apart because
/// the two modes index users in opposite orders.
struct Coefficients {
  std::vector<double> alpha;
  double alpha_t = 0.0;
  double alpha_prime = -1.0;
  std::vector<double> omega;  ///< -1 + sum_{j>i} alpha_j
  std::vector<double> b;
  std::vector<double> a;  ///< 1 - sum_{l<=i} b_l

  std::size_t size() const { return alpha.size(); }

  static Coefficients from_products(std::vector<double> products) {
    if (products.empty()) {
      throw DimensionError("Coefficients: need at least one user");
    }
    Coefficients c;
    const std::size_t n = products.size();
    c.alpha = products;
    c.b = std::move(products);
    c.alpha_t = std::accumulate(c.alpha.begin(), c.alpha.end(), 0.0);
    c.alpha_prime = c.alpha_t - 1.0;
    c.omega.assign(n, -1.0);
    double tail = 0.0;
    for (std::size_t i = n; i-- > 0;) {
      c.omega[i] = -1.0 + tail;
      tail += c.alpha[i];
    }
    c.a.resize(n);
    double head = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      head += c.b[i];
      c.a[i] = 1.0 - head;
    }
    return c;
  }

  /// Users are taken in the order given; sort the realization first.
  static Coefficients from_channel(const ChannelRealization& ch, const SystemPowers& powers) {
    ch.validate();
    std::vector<double> products(ch.n_users());
    for (std::size_t i = 0; i < products.size(); ++i) {
      products[i] = powers.xi_at(i) * ch.g2[i] * ch.h2[i] * powers.p_a;
    }
    return from_products(std::move(products));
  }
};

struct RateConstraints {
  std::vector<double> r_min;

  bool active() const {
    for (double r : r_min) {
      if (r > 0.0) {
        return true;
      }
    }
    return false;
  }

  void validate(std::size_t n_users) const {
    if (!r_min.empty() && r_min.size() != n_users) {
      throw DimensionError("RateConstraints: r_min length must equal the user count");
    }
    for (double r : r_min) {
      if (!std::isfinite(r) || r < 0.0) {
        throw DimensionError("RateConstraints: r_min entries must be finite and >= 0");
      }
    }
  }

  double at(std::size_t i) const { return r_min.empty() ? 0.0 : r_min[i]; }
};

/// A realization put in the decoding/transmission order of one mode.
/// Half-duplex sorts ascending in |h|; asynchronous starts the strongest
/// user first (descending). perm[k] is the original index of slot k.
struct OrderedInstance {
  ChannelRealization channel;
  SystemPowers powers;
  Coefficients coeffs;
  std::vector<std::size_t> perm;
};

inline OrderedInstance order_for_mode(const ChannelRealization& ch, const SystemPowers& powers,
                                      Mode mode) {
  ch.validate();
  powers.validate(ch.n_users());
  auto [sorted, perm] = sort_by_uplink_gain(ch, mode == Mode::half_duplex);
  OrderedInstance inst;
  inst.powers = powers.permuted(perm);
  inst.coeffs = Coefficients::from_channel(sorted, inst.powers);
  inst.channel = std::move(sorted);
  inst.perm = std::move(perm);
  return inst;
}

namespace detail {

/// x * log2(1 + c / x) with the x -> 0+ limit taken as zero.
inline double perspective_log2(double x, double c) {
  if (x <= 0.0) {
    return 0.0;
  }
  return x * std::log1p(c / x) / kLn2;
}

inline void check_index(std::size_t i, std::size_t n, const char* what) {
  if (i >= n) {
    throw DimensionError(std::string(what) + ": user index " + std::to_string(i) +
                         " out of range for " + std::to_string(n) + " users");
  }
}

/// tau0 + sum_{j<i} tau_j: time user i (0-based) has spent harvesting.
inline double harvest_prefix(std::size_t i, const TimeAllocation& alloc) {
  double p = alloc.tau0;
  for (std::size_t j = 0; j < i; ++j) {
    p += alloc.tau[j];
  }
  return p;
}

/// sum_{k>=i} tau_k: remaining transmission span of user i (0-based).
inline double active_span(std::size_t i, const TimeAllocation& alloc) {
  double s = 0.0;
  for (std::size_t k = i; k < alloc.tau.size(); ++k) {
    s += alloc.tau[k];
  }
  return s;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Harvested energy and transmit power. User indices are 0-based.

inline double harvested_energy_hd(double tau0, double g2_i, double p_a) {
  return tau0 * g2_i * p_a;
}

inline double harvested_energy_at(std::size_t i, const TimeAllocation& alloc, double g2_i,
                                  double p_a) {
  detail::check_index(i, alloc.tau.size(), "harvested_energy_at");
  return detail::harvest_prefix(i, alloc) * g2_i * p_a;
}

inline double uplink_power_hd(std::size_t i, double tau0, const SystemPowers& powers,
                              double g2_i) {
  if (!(tau0 > 0.0 && tau0 < 1.0)) {
    throw DegenerateError("uplink_power_hd: tau0 must lie strictly inside (0, 1)");
  }
  return powers.xi_at(i) * g2_i * powers.p_a * tau0 / (1.0 - tau0);
}

inline double uplink_power_at(std::size_t i, const TimeAllocation& alloc,
                              const SystemPowers& powers, double g2_i) {
  detail::check_index(i, alloc.tau.size(), "uplink_power_at");
  const double span = detail::active_span(i, alloc);
  if (!(span > 0.0)) {
    throw DegenerateError("uplink_power_at: zero transmission span");
  }
  return powers.xi_at(i) * g2_i * powers.p_a * detail::harvest_prefix(i, alloc) / span;
}

// ---------------------------------------------------------------------------
// Rates (bits/s/Hz over the unit block).

/// Half-duplex NOMA rate of user i; users ascending in |h|, so users j > i
/// interfere with user i.
inline double rate_hd_user(std::size_t i, double tau0, const Coefficients& c) {
  detail::check_index(i, c.size(), "rate_hd_user");
  if (tau0 <= 0.0 || tau0 >= 1.0) {
    return 0.0;
  }
  return (1.0 - tau0) * std::log1p(c.alpha[i] * tau0 / (1.0 + c.omega[i] * tau0)) / kLn2;
}

inline double rate_hd_sum(double tau0, const Coefficients& c) {
  if (tau0 <= 0.0 || tau0 >= 1.0) {
    return 0.0;
  }
  return detail::perspective_log2(1.0 - tau0, c.alpha_t * tau0);
}

/// Sum rate during interval tau_i of the overlapping asynchronous scheme,
/// tau_i * log2(1 + sum_{l<=i} b_l * prefix_l / span_l). On a full block
/// (tau0 + sum tau = 1) this is tau_i * log2(a_i + sum_{l<=i} b_l / span_l).
inline double rate_at_interval_sum(std::size_t i, const TimeAllocation& alloc,
                                   const Coefficients& c) {
  detail::check_index(i, alloc.tau.size(), "rate_at_interval_sum");
  if (alloc.tau[i] <= 0.0) {
    return 0.0;
  }
  double snr = 0.0;
  for (std::size_t l = 0; l <= i; ++l) {
    const double span = detail::active_span(l, alloc);
    if (!(span > 0.0)) {
      throw DegenerateError("rate_at_interval_sum: zero transmission span");
    }
    snr += c.b[l] * detail::harvest_prefix(l, alloc) / span;
  }
  return alloc.tau[i] * std::log1p(snr) / kLn2;
}

/// Total rate of user j over its whole active span in the overlapping
/// scheme. Users k < j (better channels, decoded later) interfere.
inline double rate_at_user(std::size_t j, const TimeAllocation& alloc, const Coefficients& c) {
  detail::check_index(j, alloc.tau.size(), "rate_at_user");
  const double span_j = detail::active_span(j, alloc);
  if (span_j <= 0.0) {
    return 0.0;
  }
  double interference = 1.0;
  for (std::size_t k = 0; k < j; ++k) {
    interference += c.b[k] * detail::harvest_prefix(k, alloc) / detail::active_span(k, alloc);
  }
  const double gamma_j = c.b[j] * detail::harvest_prefix(j, alloc) / span_j;
  return span_j * std::log1p(gamma_j / interference) / kLn2;
}

/// Non-overlapping slot rate with harvesting continuing until the slot starts.
inline double rate_tdma_user(std::size_t i, const TimeAllocation& alloc, const Coefficients& c) {
  detail::check_index(i, alloc.tau.size(), "rate_tdma_user");
  return detail::perspective_log2(alloc.tau[i], c.b[i] * detail::harvest_prefix(i, alloc));
}

/// Half-duplex TDMA slot rate: energy harvested only during tau0.
inline double rate_tdma_hd_user(std::size_t i, const TimeAllocation& alloc,
                                const Coefficients& c) {
  detail::check_index(i, alloc.tau.size(), "rate_tdma_hd_user");
  return detail::perspective_log2(alloc.tau[i], c.b[i] * alloc.tau0);
}

// ---------------------------------------------------------------------------
// Energy and energy efficiency.

inline double energy_total(Mode mode, const TimeAllocation& alloc, const SystemPowers& powers) {
  if (mode == Mode::half_duplex) {
    return alloc.tau0 * powers.p_dt() + (1.0 - alloc.tau0) * powers.p_cu;
  }
  const std::size_t n = alloc.tau.size();
  double downlink = alloc.tau0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    downlink += alloc.tau[i];
  }
  return downlink * powers.p_dt() + powers.p_cu * alloc.uplink();
}

/// Half-duplex TDMA: WPT on only during tau0, one decoder per slot.
inline double energy_tdma_hd(const TimeAllocation& alloc, const SystemPowers& powers) {
  return alloc.tau0 * powers.p_dt() + powers.p_cu * alloc.uplink();
}

/// Written as tau0 * P_delta + P_cU, which equals the half-duplex energy_total.
inline double ee_hd(double tau0, const Coefficients& c, const SystemPowers& powers) {
  const double denom = tau0 * powers.p_delta() + powers.p_cu;
  if (!(denom > 0.0)) {
    throw DegenerateError("ee_hd: nonpositive energy consumption");
  }
  return rate_hd_sum(tau0, c) / denom;
}

/// Default per-interval decoder power: i active users in interval i, each
/// costing p_cu.
inline std::vector<double> interval_circuit_powers(const SystemPowers& powers, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = static_cast<double>(i + 1) * powers.p_cu;
  }
  return out;
}

inline double energy_at_overlap(const TimeAllocation& alloc, const SystemPowers& powers,
                                std::span<const double> pcu_per_interval) {
  const std::size_t n = alloc.tau.size();
  if (pcu_per_interval.size() != n) {
    throw DimensionError("energy_at_overlap: one circuit power per interval required");
  }
  double downlink = alloc.tau0;
  double circuit = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i + 1 < n) {
      downlink += alloc.tau[i];
    }
    circuit += alloc.tau[i] * pcu_per_interval[i];
  }
  return powers.p_dt() * downlink + circuit;
}

inline double ee_at_overlap(const TimeAllocation& alloc, const Coefficients& c,
                            const SystemPowers& powers,
                            std::span<const double> pcu_per_interval) {
  double rate = 0.0;
  for (std::size_t i = 0; i < alloc.tau.size(); ++i) {
    rate += rate_at_interval_sum(i, alloc, c);
  }
  const double denom = energy_at_overlap(alloc, powers, pcu_per_interval);
  if (!(denom > 0.0)) {
    throw DegenerateError("ee_at_overlap: nonpositive energy consumption");
  }
  return rate / denom;
}

inline double ee_at_overlap(const TimeAllocation& alloc, const Coefficients& c,
                            const SystemPowers& powers) {
  const auto pcu = interval_circuit_powers(powers, alloc.tau.size());
  return ee_at_overlap(alloc, c, powers, pcu);
}

inline double ee_at_tdma(const TimeAllocation& alloc, const Coefficients& c,
                         const SystemPowers& powers) {
  double rate = 0.0;
  for (std::size_t i = 0; i < alloc.tau.size(); ++i) {
    rate += rate_tdma_user(i, alloc, c);
  }
  const double denom = energy_total(Mode::asynchronous, alloc, powers);
  if (!(denom > 0.0)) {
    throw DegenerateError("ee_at_tdma: nonpositive energy consumption");
  }
  return rate / denom;
}

// ---------------------------------------------------------------------------
// Second-order information for the two-user overlapping scheme.

/// Symmetric 2x2 Hessian with respect to (tau_1, tau_2).
struct Hessian2 {
  double f11 = 0.0;
  double f22 = 0.0;
  double f12 = 0.0;

  double det() const { return f11 * f22 - f12 * f12; }
};

/// Hessian of R1 = tau1 * log2(a1 + b1 / (tau1 + tau2)).
inline Hessian2 hessian_r1(double tau1, double tau2, double a1, double b1) {
  const double s = tau1 + tau2;
  const double v = a1 + b1 / s;
  const double v1 = -b1 / (s * s);  // dv/dtau1 = dv/dtau2
  const double v11 = 2.0 * b1 / (s * s * s);
  const double curv = (v11 * v - v1 * v1) / (v * v);
  Hessian2 h;
  h.f11 = (2.0 * v1 / v + tau1 * curv) / kLn2;
  h.f22 = tau1 * curv / kLn2;
  h.f12 = (v1 / v + tau1 * curv) / kLn2;
  return h;
}

/// Hessian of R2 = tau2 * log2(a2 + b1 / (tau1 + tau2) + b2 / tau2).
inline Hessian2 hessian_r2(double tau1, double tau2, double a2, double b1, double b2) {
  const double s = tau1 + tau2;
  const double u = a2 + b1 / s + b2 / tau2;
  const double u1 = -b1 / (s * s);
  const double u2 = u1 - b2 / (tau2 * tau2);
  const double u11 = 2.0 * b1 / (s * s * s);
  const double u22 = u11 + 2.0 * b2 / (tau2 * tau2 * tau2);
  const double u12 = u11;
  Hessian2 h;
  h.f11 = tau2 * (u11 * u - u1 * u1) / (u * u) / kLn2;
  h.f22 = (2.0 * u2 / u + tau2 * (u22 * u - u2 * u2) / (u * u)) / kLn2;
  h.f12 = (u1 / u + tau2 * (u12 * u - u1 * u2) / (u * u)) / kLn2;
  return h;
}

struct Derivatives {
  double first = 0.0;
  double second = 0.0;
};

/// First and second derivative of
/// h(tau_B) = (1 - tau_B) * log2(1 + a_i tau_B / (1 + (a_star - 1) tau_B)).
inline Derivatives h_tau_derivs(double tau_b, double a_i, double a_star) {
  const double t = tau_b;
  const double base = 1.0 - t + a_star * t;
  const double full = 1.0 - t + a_i * t + a_star * t;
  Derivatives d;
  d.first = (-std::log1p(a_i * t / base) + (1.0 - t) * a_i / (full * base)) / kLn2;
  d.second = -((1.0 - t) * (2.0 * a_i * a_star + a_i * a_i) +
               2.0 * a_i * a_star * t * (a_star + a_i)) /
             (base * base * full * full) / kLn2;
  return d;
}

}  // namespace wpcn

#endif  // WPCN_MODEL_HPP
