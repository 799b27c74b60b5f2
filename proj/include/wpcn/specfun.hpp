#ifndef WPCN_SPECFUN_HPP
#define WPCN_SPECFUN_HPP

#include <algorithm>
#include <cmath>
#include <concepts>
#include <limits>
#include <numbers>

#include "wpcn/errors.hpp"

namespace wpcn {

namespace detail {

template <std::floating_point Real>
Real lambert_w0_initial_guess(Real y) {
  constexpr Real e = std::numbers::e_v<Real>;
  if (y < Real(-0.25)) {
    // branch-point series in p = sqrt(2(e*y + 1))
    const Real p = std::sqrt(std::max(Real(0), Real(2) * (e * y + Real(1))));
    return Real(-1) + p * (Real(1) + p * (Real(-1) / 3 + p * (Real(11) / 72 + p * Real(-43) / 540)));
  }
  if (y <= e) {
    return std::log1p(y);
  }
  const Real l1 = std::log(y);
  const Real l2 = std::log(l1);
  return l1 - l2 + l2 / l1;
}

}  // namespace detail

/// Principal branch W0 of the Lambert W function: the x >= -1 with x*e^x = y.
///
/// Halley iteration from a series guess near the branch point and a
/// logarithmic guess elsewhere. Arguments in [-1/e - 1e-15, -1/e] are treated
/// as the branch point and return -1.
template <std::floating_point Real = double>
Real lambert_w0(Real y) {
  constexpr Real inv_e = Real(1) / std::numbers::e_v<Real>;
  constexpr Real slack = Real(1e-15);
  if (std::isnan(y)) {
    return y;
  }
  if (y < -inv_e - slack) {
    throw LambertDomainError(static_cast<double>(y));
  }
  if (y <= -inv_e) {
    return Real(-1);
  }
  if (y == Real(0)) {
    return Real(0);
  }
  if (std::isinf(y)) {
    return y;
  }

  Real w = detail::lambert_w0_initial_guess(y);
  constexpr Real eps = std::numeric_limits<Real>::epsilon();
  for (int iter = 0; iter < 100; ++iter) {
    const Real ew = std::exp(w);
    const Real f = w * ew - y;
    if (f == Real(0)) {
      break;
    }
    const Real wp1 = w + Real(1);
    if (wp1 == Real(0)) {
      break;
    }
    const Real fp = ew * wp1;
    const Real step = f / (fp - (w + Real(2)) * f / (Real(2) * wp1));
    Real next = w - step;
    if (next < Real(-1)) {
      next = (w + Real(-1)) / 2;
    }
    const bool done = std::abs(next - w) <= Real(2) * eps * (Real(1) + std::abs(next));
    w = next;
    if (done) {
      break;
    }
  }
  return w;
}

/// W0(e^log_y) without forming e^log_y, for arguments that overflow.
template <std::floating_point Real = double>
Real lambert_w0_exp(Real log_y) {
  if (log_y < Real(600)) {
    return lambert_w0(std::exp(log_y));
  }
  // w + ln(w) = log_y, Newton from the asymptotic guess
  Real w = log_y - std::log(log_y);
  for (int iter = 0; iter < 50; ++iter) {
    const Real step = (w + std::log(w) - log_y) / (Real(1) + Real(1) / w);
    w -= step;
    if (std::abs(step) <= Real(4) * std::numeric_limits<Real>::epsilon() * w) {
      break;
    }
  }
  return w;
}

}  // namespace wpcn

#endif  // WPCN_SPECFUN_HPP
