#ifndef WPCN_DINKELBACH_HPP
#define WPCN_DINKELBACH_HPP

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "wpcn/errors.hpp"
#include "wpcn/model.hpp"

namespace wpcn {

struct DinkelbachConfig {
  double lambda0 = 0.0;
  double epsilon = 1e-8;
  int max_iters = 50;

  void validate() const {
    if (!(lambda0 >= 0.0)) {
      throw ConfigError("DinkelbachConfig: lambda0 must be >= 0");
    }
    if (!(epsilon > 0.0 && epsilon <= 1e-2)) {
      throw ConfigError("DinkelbachConfig: epsilon must lie in (0, 1e-2]");
    }
    if (max_iters < 1) {
      throw ConfigError("DinkelbachConfig: max_iters must be positive");
    }
  }
};

struct TraceEntry {
  int iteration = 0;
  double lambda = 0.0;
  double f = 0.0;  ///< rate - lambda * energy at the inner maximizer
};

/// Outcome of one solve. `rates` are per slot in the solver's user order;
/// `duals` holds whichever multipliers the problem has (lambda, mu, kappa_i,
/// zeta).
struct OptResult {
  TimeAllocation alloc;
  double ee = 0.0;
  std::vector<double> rates;
  std::map<std::string, double> duals;
  std::vector<TraceEntry> trace;
  bool converged = false;

  int iterations() const { return static_cast<int>(trace.size()); }
};

/// Inner maximizer output for a fixed lambda.
struct Candidate {
  TimeAllocation alloc;
  double rate = 0.0;
  double energy = 0.0;
};

struct DinkelbachOutcome {
  Candidate best;
  double lambda = 0.0;
  std::vector<TraceEntry> trace;
  bool converged = false;
};

/// Generic Dinkelbach loop: F_n = rate - lambda_n * energy at the inner
/// maximizer, lambda_{n+1} = rate / energy, stop once |F_n| < epsilon.
template <class Inner>
DinkelbachOutcome dinkelbach(Inner&& inner, const DinkelbachConfig& cfg) {
  cfg.validate();
  DinkelbachOutcome out;
  double lambda = cfg.lambda0;
  for (int n = 0; n < cfg.max_iters; ++n) {
    Candidate cand = inner(lambda);
    if (!(cand.energy > 0.0)) {
      throw DegenerateError("dinkelbach: nonpositive energy at the inner maximizer");
    }
    const double f = cand.rate - lambda * cand.energy;
    out.trace.push_back({n, lambda, f});
    const double next = cand.rate / cand.energy;
    out.best = std::move(cand);
    out.lambda = next;
    if (std::abs(f) < cfg.epsilon) {
      out.converged = true;
      break;
    }
    lambda = next;
  }
  return out;
}

}  // namespace wpcn

#endif  // WPCN_DINKELBACH_HPP
