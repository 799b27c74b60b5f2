#ifndef WPCN_SWEEP_HPP
#define WPCN_SWEEP_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "wpcn/async_opt.hpp"
#include "wpcn/baselines.hpp"
#include "wpcn/channel.hpp"
#include "wpcn/dinkelbach.hpp"
#include "wpcn/errors.hpp"
#include "wpcn/halfduplex_opt.hpp"
#include "wpcn/model.hpp"
#include "wpcn/qos.hpp"

namespace wpcn {

enum class SweepVariable { p_a, p_cu, theta2 };

enum class CaseKind { case1_hd, case1_at, case2, case3, pr3a, pr3b, pr4a, pr4b };

inline const char* to_string(SweepVariable v) {
  switch (v) {
    case SweepVariable::p_a:
      return "p_a";
    case SweepVariable::p_cu:
      return "p_cu";
    case SweepVariable::theta2:
      return "theta2";
  }
  return "?";
}

inline const char* to_string(CaseKind c) {
  switch (c) {
    case CaseKind::case1_hd:
      return "case1_hd";
    case CaseKind::case1_at:
      return "case1_at";
    case CaseKind::case2:
      return "case2";
    case CaseKind::case3:
      return "case3";
    case CaseKind::pr3a:
      return "pr3a";
    case CaseKind::pr3b:
      return "pr3b";
    case CaseKind::pr4a:
      return "pr4a";
    case CaseKind::pr4b:
      return "pr4b";
  }
  return "?";
}

inline bool is_qos_case(CaseKind c) { return c == CaseKind::pr4a || c == CaseKind::pr4b; }

/// Everything needed to set up one problem family: a fixed channel or a
/// fading model (then results are averaged over mc.samples frozen draws).
struct ProblemConfig {
  SystemPowers powers;
  std::optional<ChannelRealization> channel;
  std::optional<FadingSpec> fading;
  QoSProfile qos;
  McConfig mc;
  RateConstraints rmin;
  DinkelbachConfig dinkelbach;
  DecodeOrder decode_order = DecodeOrder::per_draw;
  ExponentSpan exponent_span = ExponentSpan::interval;

  std::size_t n_users() const {
    if (channel) {
      return channel->n_users();
    }
    if (fading) {
      return fading->n_users();
    }
    return 0;
  }

  void validate() const {
    if (!channel && !fading) {
      throw ConfigError("config: need a \"channel\" or a \"fading\" section");
    }
    if (channel) {
      channel->validate();
    }
    if (fading) {
      fading->validate();
    }
    const std::size_t n = n_users();
    powers.validate(n);
    rmin.validate(n);
    dinkelbach.validate();
    mc.validate();
    if (!qos.theta.empty()) {
      qos.validate(n);
    }
  }
};

struct SweepSpec {
  ProblemConfig problem;
  SweepVariable variable = SweepVariable::p_a;
  std::vector<double> values;  ///< already converted to linear units
  std::vector<double> labels;  ///< values as written in the config (for the CSV)
  std::vector<CaseKind> cases;
  unsigned threads = 1;

  void validate() const {
    problem.validate();
    if (values.empty()) {
      throw ConfigError("sweep: \"values\" must be nonempty");
    }
    if (labels.size() != values.size()) {
      throw ConfigError("sweep: labels and values disagree");
    }
    if (cases.empty()) {
      throw ConfigError("sweep: \"cases\" must be nonempty");
    }
    if (variable == SweepVariable::theta2 && problem.n_users() < 2) {
      throw ConfigError("sweep: theta2 needs at least two users");
    }
    for (CaseKind c : cases) {
      if (is_qos_case(c) && (!problem.fading || problem.qos.theta.empty())) {
        throw ConfigError(std::string("sweep: case ") + to_string(c) +
                          " needs \"fading\" and \"qos\" sections");
      }
    }
  }
};

/// One table row. Interval columns follow the solver's slot order; rate
/// columns follow the physical user index.
struct SweepRow {
  CaseKind kind = CaseKind::case1_hd;
  SweepVariable variable = SweepVariable::p_a;
  double sweep_value = 0.0;
  double tau0 = 0.0;
  std::vector<double> tau;
  double ee = 0.0;
  std::optional<double> effective_ee;
  std::vector<double> rates;
  int iterations = 0;
  bool converged = true;
  std::uint64_t seed = 0;
  std::string error;  ///< nonempty when the row could not be solved
  bool infeasible = false;
};

struct SweepTable {
  std::size_t n_users = 0;
  std::vector<SweepRow> rows;

  bool all_converged() const {
    return std::all_of(rows.begin(), rows.end(), [](const SweepRow& r) { return r.converged; });
  }
  bool any_infeasible() const {
    return std::any_of(rows.begin(), rows.end(), [](const SweepRow& r) { return r.infeasible; });
  }
};

/// Result of one case on one problem instance, mapped to physical users.
struct CaseOutcome {
  OptResult result;
  std::vector<double> user_rates;
};

namespace detail {

template <class T>
std::vector<T> to_slots(const std::vector<T>& physical, const std::vector<std::size_t>& perm) {
  std::vector<T> out(perm.size());
  for (std::size_t k = 0; k < perm.size(); ++k) {
    out[k] = physical[perm[k]];
  }
  return out;
}

inline std::vector<double> to_users(const std::vector<double>& slots,
                                    const std::vector<std::size_t>& perm) {
  std::vector<double> out(perm.size(), 0.0);
  for (std::size_t k = 0; k < perm.size() && k < slots.size(); ++k) {
    out[perm[k]] = slots[k];
  }
  return out;
}

}  // namespace detail

/// Solves a deterministic-channel case.
inline CaseOutcome solve_case(CaseKind kind, const ChannelRealization& ch,
                              const ProblemConfig& cfg) {
  const bool hd = kind == CaseKind::case1_hd || kind == CaseKind::case2 || kind == CaseKind::case3;
  const OrderedInstance inst =
      order_for_mode(ch, cfg.powers, hd ? Mode::half_duplex : Mode::asynchronous);
  RateConstraints rmin;
  if (!cfg.rmin.r_min.empty()) {
    rmin.r_min = detail::to_slots(cfg.rmin.r_min, inst.perm);
  }
  CaseOutcome out;
  switch (kind) {
    case CaseKind::case1_hd:
      out.result = solve_pr1(inst.coeffs, inst.powers, cfg.dinkelbach);
      break;
    case CaseKind::case2:
      out.result = case2_hd(inst.coeffs, inst.powers);
      break;
    case CaseKind::case3:
      out.result = case3_tdma(inst.coeffs, inst.powers, rmin, cfg.dinkelbach);
      break;
    case CaseKind::case1_at:
    case CaseKind::pr3a:
      out.result = solve_pr3a(inst.coeffs, inst.powers, cfg.dinkelbach);
      break;
    case CaseKind::pr3b:
      out.result = solve_pr3b(inst.coeffs, inst.powers, rmin, cfg.dinkelbach);
      break;
    case CaseKind::pr4a:
    case CaseKind::pr4b:
      throw ConfigError(std::string(to_string(kind)) + " needs a fading model");
  }
  out.user_rates = detail::to_users(out.result.rates, inst.perm);
  return out;
}

namespace detail {

/// Applies the sweep variable to a copy of the problem.
inline ProblemConfig at_point(const ProblemConfig& base, SweepVariable var, double value) {
  ProblemConfig cfg = base;
  switch (var) {
    case SweepVariable::p_a:
      cfg.powers.p_a = value;
      break;
    case SweepVariable::p_cu:
      cfg.powers.p_cu = value;
      break;
    case SweepVariable::theta2:
      cfg.qos.theta.at(1) = value;
      break;
  }
  return cfg;
}

inline void fill_row(SweepRow& row, const OptResult& r, const std::vector<double>& rates) {
  row.tau0 = r.alloc.tau0;
  row.tau = r.alloc.tau;
  row.ee = r.ee;
  row.rates = rates;
  row.iterations = r.iterations();
  row.converged = r.converged;
}

/// Runs one (point, case) cell. Fading problems average the per-draw optimum
/// over the frozen draws in draw order.
inline SweepRow run_cell(const ProblemConfig& cfg, CaseKind kind,
                         const std::vector<ChannelRealization>* draws) {
  SweepRow row;
  row.kind = kind;
  row.seed = cfg.mc.seed;
  const std::size_t n = cfg.n_users();
  if (kind == CaseKind::pr4a) {
    const HdEnsemble ens(FadingSamples(*draws), cfg.powers, cfg.decode_order);
    const OptResult r = solve_pr4a(cfg.qos, ens, cfg.powers, cfg.dinkelbach);
    fill_row(row, r, r.rates);
    row.effective_ee = r.ee;
    return row;
  }
  if (kind == CaseKind::pr4b) {
    const AtEnsemble ens(FadingSamples(*draws), cfg.powers, cfg.decode_order);
    const OptResult r = solve_pr4b(cfg.qos, ens, cfg.powers, cfg.dinkelbach, cfg.exponent_span);
    fill_row(row, r, r.rates);
    row.effective_ee = r.ee;
    return row;
  }
  if (cfg.channel) {
    const CaseOutcome o = solve_case(kind, *cfg.channel, cfg);
    fill_row(row, o.result, o.user_rates);
    return row;
  }
  // average over draws
  double tau0 = 0.0;
  double ee = 0.0;
  std::vector<double> tau;
  std::vector<double> rates(n, 0.0);
  int iterations = 0;
  bool converged = true;
  for (const auto& ch : *draws) {
    const CaseOutcome o = solve_case(kind, ch, cfg);
    tau0 += o.result.alloc.tau0;
    ee += o.result.ee;
    if (tau.empty()) {
      tau.assign(o.result.alloc.tau.size(), 0.0);
    }
    for (std::size_t k = 0; k < tau.size(); ++k) {
      tau[k] += o.result.alloc.tau[k];
    }
    for (std::size_t i = 0; i < n; ++i) {
      rates[i] += o.user_rates[i];
    }
    iterations = std::max(iterations, o.result.iterations());
    converged = converged && o.result.converged;
  }
  const double m = static_cast<double>(draws->size());
  row.tau0 = tau0 / m;
  for (double& t : tau) {
    t /= m;
  }
  row.tau = std::move(tau);
  row.ee = ee / m;
  for (double& r : rates) {
    r /= m;
  }
  row.rates = std::move(rates);
  row.iterations = iterations;
  row.converged = converged;
  return row;
}

}  // namespace detail

/// Runs every (value, case) cell. Rows come out value-major in spec order;
/// every cell reuses the same frozen draws, so the table does not depend on
/// the number of threads.
inline SweepTable run_sweep(const SweepSpec& spec) {
  spec.validate();
  const ProblemConfig& base = spec.problem;
  std::vector<ChannelRealization> draws;
  if (base.fading) {
    draws = FadingSamples(*base.fading, base.mc).draws();
  }
  SweepTable table;
  table.n_users = base.n_users();
  const std::size_t n_cases = spec.cases.size();
  const std::size_t total = spec.values.size() * n_cases;
  table.rows.resize(total);
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t cell = next++; cell < total; cell = next++) {
      const std::size_t v = cell / n_cases;
      const CaseKind kind = spec.cases[cell % n_cases];
      SweepRow row;
      try {
        const ProblemConfig cfg = detail::at_point(base, spec.variable, spec.values[v]);
        row = detail::run_cell(cfg, kind, draws.empty() ? nullptr : &draws);
      } catch (const InfeasibleRates& e) {
        row = SweepRow{};
        row.error = e.what();
        row.infeasible = true;
        row.converged = false;
      } catch (const Error& e) {
        row = SweepRow{};
        row.error = e.what();
        row.converged = false;
      }
      row.kind = kind;
      row.variable = spec.variable;
      row.sweep_value = spec.labels[v];
      row.seed = base.mc.seed;
      table.rows[cell] = std::move(row);
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(spec.threads, total));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back(worker);
    }
    for (auto& th : pool) {
      th.join();
    }
  }
  return table;
}

// ---------------------------------------------------------------------------
// CSV (schema 1).

inline constexpr int kCsvSchema = 1;

namespace detail {

inline std::string fmt17(double x) {
  if (std::isnan(x)) {
    return "nan";
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace detail

inline void write_csv(std::ostream& os, const SweepTable& table) {
  const std::size_t n = table.n_users;
  os << "# schema=" << kCsvSchema << '\n';
  os << "case,sweep_var,sweep_value,tau0";
  for (std::size_t i = 1; i <= n; ++i) {
    os << ",tau_" << i;
  }
  os << ",ee,effective_ee";
  for (std::size_t i = 1; i <= n; ++i) {
    os << ",rate_" << i;
  }
  os << ",iterations,converged,seed\n";
  for (const SweepRow& r : table.rows) {
    const bool ok = r.error.empty();
    os << to_string(r.kind) << ',' << to_string(r.variable) << ',' << detail::fmt17(r.sweep_value)
       << ',' << (ok ? detail::fmt17(r.tau0) : "");
    for (std::size_t i = 0; i < n; ++i) {
      os << ',';
      if (ok && i < r.tau.size()) {
        os << detail::fmt17(r.tau[i]);
      }
    }
    os << ',' << (ok ? detail::fmt17(r.ee) : "") << ',';
    if (ok && r.effective_ee) {
      os << detail::fmt17(*r.effective_ee);
    }
    for (std::size_t i = 0; i < n; ++i) {
      os << ',';
      if (ok && i < r.rates.size()) {
        os << detail::fmt17(r.rates[i]);
      }
    }
    os << ',' << r.iterations << ',' << (r.converged ? 1 : 0) << ',' << r.seed << '\n';
  }
}

inline std::string to_csv(const SweepTable& table) {
  std::ostringstream os;
  write_csv(os, table);
  return os.str();
}

}  // namespace wpcn

#endif  // WPCN_SWEEP_HPP
