#ifndef WPCN_ERRORS_HPP
#define WPCN_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace wpcn {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the principal-branch domain [-1/e, inf) of Lambert W.
class LambertDomainError : public Error {
public:
  explicit LambertDomainError(double arg)
      : Error("lambert_w0: argument " + std::to_string(arg) + " is below -1/e"), argument(arg) {}

  double argument;
};

/// Inputs for which a formula has no finite value (zero denominators,
/// vanishing intervals, degenerate coefficient sums).
class DegenerateError : public Error {
public:
  using Error::Error;
};

/// Closed-form harvesting time needs alpha' = alpha_T - 1 away from zero.
class AlphaDegenerate : public DegenerateError {
public:
  using DegenerateError::DegenerateError;
};

class DimensionError : public Error {
public:
  using Error::Error;
};

/// No allocation on the simplex meets every minimum-rate floor.
class InfeasibleRates : public Error {
public:
  using Error::Error;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

}  // namespace wpcn

#endif  // WPCN_ERRORS_HPP
