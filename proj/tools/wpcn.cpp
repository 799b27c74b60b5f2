// Command-line runner: single solves and parameter sweeps from a JSON config.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "wpcn/config.hpp"
#include "wpcn/sweep.hpp"

namespace {

enum Exit { kOk = 0, kConfig = 2, kInfeasible = 3, kNoConvergence = 4 };

struct Globals {
  std::string config = "-";
  std::optional<std::uint64_t> seed;
  std::optional<double> epsilon;
  std::string output;
  std::string trace;
  bool json = false;
  unsigned threads = 1;
  bool async_qos = false;
};

nlohmann::json load(const std::string& path) {
  if (path == "-") {
    return wpcn::config::read_stream(std::cin);
  }
  std::ifstream in(path);
  if (!in) {
    throw wpcn::ConfigError("cannot open config file " + path);
  }
  return wpcn::config::read_stream(in);
}

void apply_overrides(wpcn::ProblemConfig& cfg, const Globals& g) {
  if (g.seed) {
    cfg.mc.seed = *g.seed;
    if (cfg.fading) {
      cfg.fading->seed = *g.seed;
    }
  }
  if (g.epsilon) {
    cfg.dinkelbach.epsilon = *g.epsilon;
    cfg.dinkelbach.validate();
  }
}

/// Opens --output or falls back to stdout.
class Sink {
public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) {
        throw wpcn::ConfigError("cannot write " + path);
      }
    }
  }
  std::ostream& get() { return file_.is_open() ? file_ : std::cout; }

private:
  std::ofstream file_;
};

void write_trace(const std::string& path, const wpcn::OptResult& r) {
  std::ofstream out(path);
  if (!out) {
    throw wpcn::ConfigError("cannot write " + path);
  }
  out << "iteration,lambda,f\n";
  char buf[128];
  for (const auto& t : r.trace) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g\n", t.iteration, t.lambda, t.f);
    out << buf;
  }
}

void report(std::ostream& os, const std::string& problem, const wpcn::OptResult& r,
            const std::vector<double>& user_rates, bool as_json) {
  if (as_json) {
    nlohmann::json j;
    j["problem"] = problem;
    j["tau0"] = r.alloc.tau0;
    j["tau"] = r.alloc.tau;
    j["ee"] = r.ee;
    j["rates"] = user_rates;
    j["duals"] = r.duals;
    j["converged"] = r.converged;
    j["iterations"] = r.iterations();
    nlohmann::json trace = nlohmann::json::array();
    for (const auto& t : r.trace) {
      trace.push_back({{"iteration", t.iteration}, {"lambda", t.lambda}, {"f", t.f}});
    }
    j["trace"] = trace;
    os << j.dump(2) << '\n';
    return;
  }
  char buf[160];
  os << "problem     " << problem << '\n';
  std::snprintf(buf, sizeof buf, "tau0        %.10g\n", r.alloc.tau0);
  os << buf;
  for (std::size_t k = 0; k < r.alloc.tau.size(); ++k) {
    std::snprintf(buf, sizeof buf, "tau_%zu       %.10g\n", k + 1, r.alloc.tau[k]);
    os << buf;
  }
  std::snprintf(buf, sizeof buf, "ee          %.12g\n", r.ee);
  os << buf;
  for (std::size_t i = 0; i < user_rates.size(); ++i) {
    std::snprintf(buf, sizeof buf, "rate_%zu      %.10g\n", i + 1, user_rates[i]);
    os << buf;
  }
  for (const auto& [name, value] : r.duals) {
    std::snprintf(buf, sizeof buf, "%-11s %.10g\n", name.c_str(), value);
    os << buf;
  }
  os << "converged   " << (r.converged ? "yes" : "no") << " after " << r.iterations()
     << " iterations\n";
  for (const auto& t : r.trace) {
    std::snprintf(buf, sizeof buf, "  n=%-3d lambda=%.12g F=%.3e\n", t.iteration, t.lambda, t.f);
    os << buf;
  }
}

int run_single(wpcn::CaseKind kind, const std::string& name, const Globals& g) {
  wpcn::ProblemConfig cfg = wpcn::config::parse_problem(load(g.config));
  apply_overrides(cfg, g);
  wpcn::OptResult result;
  std::vector<double> rates;
  if (wpcn::is_qos_case(kind)) {
    if (!cfg.fading || cfg.qos.theta.empty()) {
      throw wpcn::ConfigError("effective-ee needs \"fading\" and \"qos\" sections");
    }
    const wpcn::FadingSamples samples(*cfg.fading, cfg.mc);
    if (kind == wpcn::CaseKind::pr4a) {
      result = wpcn::solve_pr4a(cfg.qos, wpcn::HdEnsemble(samples, cfg.powers, cfg.decode_order),
                                cfg.powers, cfg.dinkelbach);
    } else {
      result = wpcn::solve_pr4b(cfg.qos, wpcn::AtEnsemble(samples, cfg.powers, cfg.decode_order),
                                cfg.powers, cfg.dinkelbach, cfg.exponent_span);
    }
    rates = result.rates;
  } else {
    if (!cfg.channel) {
      throw wpcn::ConfigError(name + " needs a \"channel\" section");
    }
    wpcn::CaseOutcome o = wpcn::solve_case(kind, *cfg.channel, cfg);
    result = std::move(o.result);
    rates = std::move(o.user_rates);
  }
  Sink sink(g.output);
  report(sink.get(), name, result, rates, g.json);
  if (!g.trace.empty()) {
    write_trace(g.trace, result);
  }
  return result.converged ? kOk : kNoConvergence;
}

int run_sweep(const Globals& g) {
  wpcn::SweepSpec spec = wpcn::config::parse_sweep(load(g.config));
  apply_overrides(spec.problem, g);
  if (g.threads > 0) {
    spec.threads = std::max(spec.threads, g.threads);
  }
  const wpcn::SweepTable table = wpcn::run_sweep(spec);
  Sink sink(g.output);
  wpcn::write_csv(sink.get(), table);
  for (const auto& row : table.rows) {
    if (!row.error.empty()) {
      std::cerr << "row " << wpcn::to_string(row.kind) << " at " << row.sweep_value << ": "
                << row.error << '\n';
    }
  }
  if (table.any_infeasible()) {
    return kInfeasible;
  }
  return table.all_converged() ? kOk : kNoConvergence;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy-efficient time allocation for wireless-powered NOMA networks"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("-c,--config", g.config, "JSON config file, '-' for stdin")->capture_default_str();
  app.add_option("--seed", g.seed, "override the Monte-Carlo seed");
  app.add_option("--epsilon", g.epsilon, "Dinkelbach stopping tolerance");
  app.add_option("-o,--output", g.output, "output file (default stdout)");
  app.add_flag("--json", g.json, "machine-readable report");
  app.add_option("--trace", g.trace, "write the Dinkelbach trace as CSV");
  app.add_option("--threads", g.threads, "worker threads for sweeps");

  auto* hd = app.add_subcommand("half-duplex", "half-duplex NOMA EE maximization");
  auto* ov = app.add_subcommand("async-overlap", "overlapping asynchronous NOMA (two users)");
  auto* no = app.add_subcommand("async-nonoverlap", "non-overlapping asynchronous, rate floors");
  auto* td = app.add_subcommand("tdma", "half-duplex TDMA baseline");
  auto* ee = app.add_subcommand("effective-ee", "effective-EE under QoS exponents");
  ee->add_flag("--async", g.async_qos, "asynchronous scheme instead of half-duplex");
  auto* sw = app.add_subcommand("sweep", "parameter sweep to CSV");
  for (auto* sub : {hd, ov, no, td, ee, sw}) {
    sub->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*hd) {
      return run_single(wpcn::CaseKind::case1_hd, "half-duplex", g);
    }
    if (*ov) {
      return run_single(wpcn::CaseKind::pr3a, "async-overlap", g);
    }
    if (*no) {
      return run_single(wpcn::CaseKind::pr3b, "async-nonoverlap", g);
    }
    if (*td) {
      return run_single(wpcn::CaseKind::case3, "tdma", g);
    }
    if (*ee) {
      return run_single(g.async_qos ? wpcn::CaseKind::pr4b : wpcn::CaseKind::pr4a,
                        "effective-ee", g);
    }
    return run_sweep(g);
  } catch (const wpcn::InfeasibleRates& e) {
    if (g.json) {
      nlohmann::json j{{"error", "InfeasibleRates"}, {"message", e.what()}};
      std::cout << j.dump(2) << '\n';
    } else {
      std::cerr << "infeasible: " << e.what() << '\n';
    }
    return kInfeasible;
  } catch (const wpcn::Error& e) {
    if (g.json) {
      nlohmann::json j{{"error", "ConfigError"}, {"message", e.what()}};
      std::cout << j.dump(2) << '\n';
    } else {
      std::cerr << "error: " << e.what() << '\n';
    }
    return kConfig;
  }
}
