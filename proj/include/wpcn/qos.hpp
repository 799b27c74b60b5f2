#ifndef WPCN_QOS_HPP
#define WPCN_QOS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "wpcn/channel.hpp"
#include "wpcn/dinkelbach.hpp"
#include "wpcn/errors.hpp"
#include "wpcn/model.hpp"
#include "wpcn/numerics.hpp"

namespace wpcn {

/// Statistical QoS requirement: per-user exponent theta_i (1/bits) over a
/// block of length block_t. q_max is the buffer threshold the exponent refers
/// to; it does not enter any computation.
struct QoSProfile {
  std::vector<double> theta;
  double block_t = 1.0;
  double q_max = 1.0;

  std::size_t n_users() const { return theta.size(); }

  void validate(std::size_t n) const {
    if (theta.size() != n) {
      throw DimensionError("QoSProfile: one exponent per user required");
    }
    for (double t : theta) {
      if (!(t > 0.0) || !std::isfinite(t)) {
        throw DimensionError("QoSProfile: exponents must be positive and finite");
      }
    }
    if (!(block_t > 0.0) || !(q_max > 0.0)) {
      throw DimensionError("QoSProfile: block_t and q_max must be positive");
    }
  }
};

struct McConfig {
  std::size_t samples = 100000;
  std::uint64_t seed = 1;

  void validate() const {
    if (samples < 100) {
      throw ConfigError("McConfig: at least 100 samples required");
    }
  }
};

/// How users are ordered inside each fading draw.
enum class DecodeOrder {
  per_draw,  ///< re-sort every draw by its uplink gains
  fixed,     ///< keep the index order of the fading spec in every draw
};

/// Exponent scaling of the asynchronous effective capacity: theta_i times
/// tau_i (interval) or times the user's whole active span.
enum class ExponentSpan { interval, active_span };

/// Frozen fading draws shared by every evaluation of one solve.
class FadingSamples {
public:
  FadingSamples(const FadingSpec& fading, const McConfig& mc) {
    mc.validate();
    FadingSpec spec = fading;
    spec.seed = mc.seed;
    draws_ = sample(spec, mc.samples);
  }

  explicit FadingSamples(std::vector<ChannelRealization> draws) : draws_(std::move(draws)) {
    if (draws_.empty()) {
      throw DimensionError("FadingSamples: need at least one draw");
    }
    for (const auto& d : draws_) {
      d.validate();
      if (d.n_users() != draws_.front().n_users()) {
        throw DimensionError("FadingSamples: draws disagree on the user count");
      }
    }
  }

  std::size_t size() const { return draws_.size(); }
  std::size_t n_users() const { return draws_.front().n_users(); }
  const std::vector<ChannelRealization>& draws() const { return draws_; }

private:
  std::vector<ChannelRealization> draws_;
};

namespace detail {

/// log(mean(exp(x))) evaluated with a fixed summation order.
inline double log_mean_exp(const std::vector<double>& x) {
  const double top = *std::max_element(x.begin(), x.end());
  double s = 0.0;
  for (double v : x) {
    s += std::expm1(v - top);
  }
  return top + std::log1p(s / static_cast<double>(x.size()));
}

inline double capacity_from_rates(const std::vector<double>& rates, double theta, double block_t) {
  std::vector<double> x(rates.size());
  for (std::size_t d = 0; d < rates.size(); ++d) {
    x[d] = -theta * rates[d];
  }
  return std::max(-log_mean_exp(x) / (block_t * theta), 0.0);
}

inline double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) {
    s += x;
  }
  return s / static_cast<double>(v.size());
}

inline std::vector<std::size_t> draw_order(const ChannelRealization& ch, DecodeOrder order,
                                           bool ascending) {
  if (order == DecodeOrder::fixed) {
    std::vector<std::size_t> perm(ch.n_users());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    return perm;
  }
  return sort_by_uplink_gain(ch, ascending).second;
}

}  // namespace detail

/// Half-duplex coefficients of every draw, indexed by physical user.
class HdEnsemble {
public:
  HdEnsemble(const FadingSamples& samples, const SystemPowers& powers,
             DecodeOrder order = DecodeOrder::per_draw)
      : n_(samples.n_users()), m_(samples.size()) {
    powers.validate(n_);
    alpha_.resize(n_ * m_);
    omega_.resize(n_ * m_);
    for (std::size_t d = 0; d < m_; ++d) {
      const auto& ch = samples.draws()[d];
      const auto perm = detail::draw_order(ch, order, true);
      double tail = 0.0;
      for (std::size_t k = n_; k-- > 0;) {
        const std::size_t user = perm[k];
        const double a = powers.xi_at(user) * ch.g2[user] * ch.h2[user] * powers.p_a;
        alpha_[d * n_ + user] = a;
        omega_[d * n_ + user] = -1.0 + tail;
        tail += a;
      }
    }
  }

  std::size_t n_users() const { return n_; }
  std::size_t size() const { return m_; }

  /// Rate of physical user i in draw d.
  double rate(std::size_t d, std::size_t i, double tau0) const {
    if (tau0 <= 0.0 || tau0 >= 1.0) {
      return 0.0;
    }
    const double a = alpha_[d * n_ + i];
    const double w = omega_[d * n_ + i];
    return (1.0 - tau0) * std::log1p(a * tau0 / (1.0 + w * tau0)) / kLn2;
  }

  std::vector<double> rates(std::size_t i, double tau0) const {
    std::vector<double> out(m_);
    for (std::size_t d = 0; d < m_; ++d) {
      out[d] = rate(d, i, tau0);
    }
    return out;
  }

private:
  std::size_t n_;
  std::size_t m_;
  std::vector<double> alpha_;
  std::vector<double> omega_;
};

/// Overlapping asynchronous coefficients of every draw. Slots follow the
/// transmission-start order (strongest uplink first when re-sorting).
class AtEnsemble {
public:
  AtEnsemble(const FadingSamples& samples, const SystemPowers& powers,
             DecodeOrder order = DecodeOrder::per_draw)
      : n_(samples.n_users()), m_(samples.size()) {
    powers.validate(n_);
    b_.resize(n_ * m_);
    slot_.resize(n_ * m_);
    for (std::size_t d = 0; d < m_; ++d) {
      const auto& ch = samples.draws()[d];
      const auto perm = detail::draw_order(ch, order, false);
      for (std::size_t s = 0; s < n_; ++s) {
        const std::size_t user = perm[s];
        b_[d * n_ + s] = powers.xi_at(user) * ch.g2[user] * ch.h2[user] * powers.p_a;
        slot_[d * n_ + user] = s;
      }
    }
  }

  std::size_t n_users() const { return n_; }
  std::size_t size() const { return m_; }
  std::size_t slot(std::size_t d, std::size_t i) const { return slot_[d * n_ + i]; }

  /// log2(1 + SINR) of slot s in draw d; users in earlier slots interfere.
  double spectral(std::size_t d, std::size_t s, const TimeAllocation& alloc) const {
    double interference = 1.0;
    for (std::size_t l = 0; l < s; ++l) {
      interference += b_[d * n_ + l] * detail::harvest_prefix(l, alloc) /
                      detail::active_span(l, alloc);
    }
    const double span = detail::active_span(s, alloc);
    if (!(span > 0.0)) {
      throw DegenerateError("effective capacity: zero transmission span");
    }
    const double gamma = b_[d * n_ + s] * detail::harvest_prefix(s, alloc) / span;
    return std::log1p(gamma / interference) / kLn2;
  }

private:
  std::size_t n_;
  std::size_t m_;
  std::vector<double> b_;
  std::vector<std::size_t> slot_;
};

// ---------------------------------------------------------------------------
// Effective capacity.

inline double effective_capacity_hd(std::size_t i, double tau0, const QoSProfile& qos,
                                    const HdEnsemble& ens) {
  qos.validate(ens.n_users());
  if (!(tau0 >= 0.0 && tau0 < 1.0)) {
    throw DimensionError("effective_capacity_hd: tau0 must lie in [0, 1)");
  }
  return detail::capacity_from_rates(ens.rates(i, tau0), qos.theta[i], qos.block_t);
}

inline double effective_capacity_hd(std::size_t i, double tau0, const QoSProfile& qos,
                                    const FadingSpec& fading, const SystemPowers& powers,
                                    const McConfig& mc,
                                    DecodeOrder order = DecodeOrder::per_draw) {
  return effective_capacity_hd(i, tau0, qos, HdEnsemble(FadingSamples(fading, mc), powers, order));
}

/// Per-draw exponent rates of physical user i in the overlapping scheme:
/// the exponent weight (tau_slot or its active span) times log2(1 + SINR).
inline std::vector<double> exponent_rates_at(std::size_t i, const TimeAllocation& alloc,
                                             const AtEnsemble& ens,
                                             ExponentSpan span = ExponentSpan::interval) {
  std::vector<double> out(ens.size());
  for (std::size_t d = 0; d < ens.size(); ++d) {
    const std::size_t s = ens.slot(d, i);
    const double weight =
        span == ExponentSpan::interval ? alloc.tau[s] : detail::active_span(s, alloc);
    out[d] = weight > 0.0 ? weight * ens.spectral(d, s, alloc) : 0.0;
  }
  return out;
}

inline double effective_capacity_at(std::size_t i, const TimeAllocation& alloc,
                                    const QoSProfile& qos, const AtEnsemble& ens,
                                    ExponentSpan span = ExponentSpan::interval) {
  qos.validate(ens.n_users());
  if (alloc.tau.size() != ens.n_users()) {
    throw DimensionError("effective_capacity_at: one interval per user required");
  }
  return detail::capacity_from_rates(exponent_rates_at(i, alloc, ens, span), qos.theta[i],
                                     qos.block_t);
}

inline double effective_capacity_at(std::size_t i, const TimeAllocation& alloc,
                                    const QoSProfile& qos, const FadingSpec& fading,
                                    const SystemPowers& powers, const McConfig& mc,
                                    ExponentSpan span = ExponentSpan::interval,
                                    DecodeOrder order = DecodeOrder::per_draw) {
  return effective_capacity_at(i, alloc, qos, AtEnsemble(FadingSamples(fading, mc), powers, order),
                               span);
}

inline double sum_effective_capacity(double tau0, const QoSProfile& qos, const HdEnsemble& ens) {
  double s = 0.0;
  for (std::size_t i = 0; i < ens.n_users(); ++i) {
    s += effective_capacity_hd(i, tau0, qos, ens);
  }
  return s;
}

inline double sum_effective_capacity(const TimeAllocation& alloc, const QoSProfile& qos,
                                     const AtEnsemble& ens,
                                     ExponentSpan span = ExponentSpan::interval) {
  double s = 0.0;
  for (std::size_t i = 0; i < ens.n_users(); ++i) {
    s += effective_capacity_at(i, alloc, qos, ens, span);
  }
  return s;
}

inline double mean_rate_hd(std::size_t i, double tau0, const HdEnsemble& ens) {
  return detail::mean(ens.rates(i, tau0));
}

inline double mean_rate_at(std::size_t i, const TimeAllocation& alloc, const AtEnsemble& ens,
                           ExponentSpan span = ExponentSpan::interval) {
  return detail::mean(exponent_rates_at(i, alloc, ens, span));
}

// ---------------------------------------------------------------------------
// Effective energy efficiency.

/// Maximizes sum_i C_i(tau0) / (tau0 P_DT + P_cU (1 - tau0)) over tau0.
inline OptResult solve_pr4a(const QoSProfile& qos, const HdEnsemble& ens,
                            const SystemPowers& powers, const DinkelbachConfig& cfg = {}) {
  qos.validate(ens.n_users());
  auto numerator = [&](double t) { return sum_effective_capacity(t, qos, ens); };
  auto energy = [&](double t) { return t * powers.p_dt() + (1.0 - t) * powers.p_cu; };
  constexpr double h = 1e-6;
  auto outcome = dinkelbach(
      [&](double lambda) {
        auto slope = [&](double t) {
          return (numerator(t + h) - lambda * energy(t + h) - numerator(t - h) +
                  lambda * energy(t - h)) /
                 (2.0 * h);
        };
        const double lo = 2.0 * h;
        const double hi = 1.0 - 2.0 * h;
        double t = 0.0;
        if (slope(lo) <= 0.0) {
          t = lo;
        } else if (slope(hi) >= 0.0) {
          t = hi;
        } else {
          t = numerics::bisect(slope, lo, hi, 1e-7);
        }
        Candidate cand;
        cand.alloc.tau0 = t;
        cand.alloc.tau = {1.0 - t};
        cand.rate = numerator(t);
        cand.energy = energy(t);
        return cand;
      },
      cfg);
  OptResult res;
  res.alloc = std::move(outcome.best.alloc);
  res.ee = outcome.lambda;
  res.rates.resize(ens.n_users());
  for (std::size_t i = 0; i < ens.n_users(); ++i) {
    res.rates[i] = effective_capacity_hd(i, res.alloc.tau0, qos, ens);
  }
  res.trace = std::move(outcome.trace);
  res.converged = outcome.converged;
  res.duals["lambda"] = res.trace.back().lambda;
  return res;
}

inline OptResult solve_pr4a(const QoSProfile& qos, const FadingSpec& fading,
                            const SystemPowers& powers, const McConfig& mc,
                            const DinkelbachConfig& cfg = {},
                            DecodeOrder order = DecodeOrder::per_draw) {
  return solve_pr4a(qos, HdEnsemble(FadingSamples(fading, mc), powers, order), powers, cfg);
}

/// Maximizes sum_i C_i(tau) / E_async(tau) over full-block allocations.
inline OptResult solve_pr4b(const QoSProfile& qos, const AtEnsemble& ens,
                            const SystemPowers& powers, const DinkelbachConfig& cfg = {},
                            ExponentSpan span = ExponentSpan::interval) {
  const std::size_t n = ens.n_users();
  qos.validate(n);
  auto to_alloc = [&](const std::vector<double>& x) {
    TimeAllocation a;
    a.tau = x;
    a.tau0 = std::max(1.0 - std::accumulate(x.begin(), x.end(), 0.0), 0.0);
    return a;
  };
  auto numerator = [&](const std::vector<double>& x) {
    return sum_effective_capacity(to_alloc(x), qos, ens, span);
  };
  auto energy = [&](const std::vector<double>& x) {
    return energy_total(Mode::asynchronous, to_alloc(x), powers);
  };
  constexpr double kFloor = 1e-9;
  auto project = [&](const std::vector<double>& y) {
    return numerics::project_capped_simplex(y, 1.0 - kFloor, kFloor);
  };
  std::vector<double> x(n, 1.0 / static_cast<double>(n + 1));
  auto outcome = dinkelbach(
      [&](double lambda) {
        auto f = [&](const std::vector<double>& y) { return numerator(y) - lambda * energy(y); };
        numerics::NewtonConfig nc;
        nc.tol = 1e-9;
        x = numerics::projected_newton_ascent(f, project, x, nc).x;
        Candidate cand;
        cand.alloc = to_alloc(x);
        cand.rate = numerator(x);
        cand.energy = energy(x);
        return cand;
      },
      cfg);
  OptResult res;
  res.alloc = std::move(outcome.best.alloc);
  res.ee = outcome.lambda;
  res.rates.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    res.rates[i] = effective_capacity_at(i, res.alloc, qos, ens, span);
  }
  res.trace = std::move(outcome.trace);
  res.converged = outcome.converged;
  res.duals["lambda"] = res.trace.back().lambda;
  return res;
}

inline OptResult solve_pr4b(const QoSProfile& qos, const FadingSpec& fading,
                            const SystemPowers& powers, const McConfig& mc,
                            const DinkelbachConfig& cfg = {},
                            ExponentSpan span = ExponentSpan::interval,
                            DecodeOrder order = DecodeOrder::per_draw) {
  return solve_pr4b(qos, AtEnsemble(FadingSamples(fading, mc), powers, order), powers, cfg, span);
}

}  // namespace wpcn

#endif  // WPCN_QOS_HPP
