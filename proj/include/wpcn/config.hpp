#ifndef WPCN_CONFIG_HPP
#define WPCN_CONFIG_HPP

#include <cmath>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "wpcn/errors.hpp"
#include "wpcn/sweep.hpp"

namespace wpcn::config {

using nlohmann::json;

/// Raised with the JSON pointer of the offending field.
inline ConfigError field_error(const std::string& path, const std::string& what) {
  return ConfigError("config field " + path + ": " + what);
}

inline double db_to_watts(double db) { return std::pow(10.0, db / 10.0); }

namespace detail {

inline const json& require(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw field_error(path + "/" + key, "missing");
  }
  return obj.at(key);
}

inline double number(const json& v, const std::string& path) {
  if (!v.is_number()) {
    throw field_error(path, "expected a number");
  }
  return v.get<double>();
}

inline std::vector<double> numbers(const json& v, const std::string& path) {
  if (!v.is_array()) {
    throw field_error(path, "expected an array of numbers");
  }
  std::vector<double> out;
  for (std::size_t k = 0; k < v.size(); ++k) {
    out.push_back(number(v[k], path + "/" + std::to_string(k)));
  }
  return out;
}

/// {"watts": x} or {"db": y}.
inline double power(const json& v, const std::string& path) {
  if (!v.is_object() || v.size() != 1) {
    throw field_error(path, "expected {\"watts\": x} or {\"db\": y}");
  }
  if (v.contains("watts")) {
    const double w = number(v.at("watts"), path + "/watts");
    if (!(w >= 0.0)) {
      throw field_error(path + "/watts", "must be >= 0");
    }
    return w;
  }
  if (v.contains("db")) {
    return db_to_watts(number(v.at("db"), path + "/db"));
  }
  throw field_error(path, "expected {\"watts\": x} or {\"db\": y}");
}

inline std::string string(const json& v, const std::string& path) {
  if (!v.is_string()) {
    throw field_error(path, "expected a string");
  }
  return v.get<std::string>();
}

inline std::uint64_t seed(const json& v, const std::string& path) {
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
    throw field_error(path, "expected a nonnegative integer");
  }
  return v.get<std::uint64_t>();
}

inline CaseKind case_kind(const std::string& s, const std::string& path) {
  for (CaseKind c : {CaseKind::case1_hd, CaseKind::case1_at, CaseKind::case2, CaseKind::case3,
                     CaseKind::pr3a, CaseKind::pr3b, CaseKind::pr4a, CaseKind::pr4b}) {
    if (s == to_string(c)) {
      return c;
    }
  }
  throw field_error(path, "unknown case \"" + s + "\"");
}

}  // namespace detail

/// Parses the problem sections of a config document.
inline ProblemConfig parse_problem(const json& doc) {
  using namespace detail;
  if (!doc.is_object()) {
    throw field_error("", "top level must be an object");
  }
  ProblemConfig cfg;
  const json& pw = require(doc, "powers", "");
  cfg.powers.p_a = power(require(pw, "p_a", "/powers"), "/powers/p_a");
  cfg.powers.p_cd = pw.contains("p_cd") ? power(pw.at("p_cd"), "/powers/p_cd") : 0.0;
  cfg.powers.p_cu = power(require(pw, "p_cu", "/powers"), "/powers/p_cu");
  if (pw.contains("xi")) {
    cfg.powers.xi = numbers(pw.at("xi"), "/powers/xi");
  }
  if (doc.contains("channel")) {
    const json& ch = doc.at("channel");
    cfg.channel = ChannelRealization{numbers(require(ch, "g2", "/channel"), "/channel/g2"),
                                     numbers(require(ch, "h2", "/channel"), "/channel/h2")};
  }
  if (doc.contains("mc")) {
    const json& mc = doc.at("mc");
    if (mc.contains("samples")) {
      const double s = number(mc.at("samples"), "/mc/samples");
      if (!(s >= 1.0) || s != std::floor(s)) {
        throw field_error("/mc/samples", "expected a positive integer");
      }
      cfg.mc.samples = static_cast<std::size_t>(s);
    }
    if (mc.contains("seed")) {
      cfg.mc.seed = seed(mc.at("seed"), "/mc/seed");
    }
  }
  if (doc.contains("fading")) {
    const json& f = doc.at("fading");
    FadingSpec spec;
    spec.beta_h = numbers(require(f, "beta_h", "/fading"), "/fading/beta_h");
    spec.beta_g = f.contains("beta_g") ? numbers(f.at("beta_g"), "/fading/beta_g") : spec.beta_h;
    if (f.contains("seed")) {
      cfg.mc.seed = seed(f.at("seed"), "/fading/seed");
    }
    spec.seed = cfg.mc.seed;
    cfg.fading = spec;
  }
  if (doc.contains("qos")) {
    const json& q = doc.at("qos");
    cfg.qos.theta = numbers(require(q, "theta", "/qos"), "/qos/theta");
    if (q.contains("block_t")) {
      cfg.qos.block_t = number(q.at("block_t"), "/qos/block_t");
    }
    if (q.contains("q_max")) {
      cfg.qos.q_max = number(q.at("q_max"), "/qos/q_max");
    }
  }
  if (doc.contains("rmin")) {
    cfg.rmin.r_min = numbers(doc.at("rmin"), "/rmin");
  }
  if (doc.contains("dinkelbach")) {
    const json& d = doc.at("dinkelbach");
    if (d.contains("epsilon")) {
      cfg.dinkelbach.epsilon = number(d.at("epsilon"), "/dinkelbach/epsilon");
    }
    if (d.contains("lambda0")) {
      cfg.dinkelbach.lambda0 = number(d.at("lambda0"), "/dinkelbach/lambda0");
    }
    if (d.contains("max_iters")) {
      cfg.dinkelbach.max_iters =
          static_cast<int>(number(d.at("max_iters"), "/dinkelbach/max_iters"));
    }
  }
  if (doc.contains("options")) {
    const json& o = doc.at("options");
    if (o.contains("decode_order")) {
      const std::string s = string(o.at("decode_order"), "/options/decode_order");
      if (s == "per_draw") {
        cfg.decode_order = DecodeOrder::per_draw;
      } else if (s == "fixed") {
        cfg.decode_order = DecodeOrder::fixed;
      } else {
        throw field_error("/options/decode_order", "expected \"per_draw\" or \"fixed\"");
      }
    }
    if (o.contains("exponent_span")) {
      const std::string s = string(o.at("exponent_span"), "/options/exponent_span");
      if (s == "interval") {
        cfg.exponent_span = ExponentSpan::interval;
      } else if (s == "active_span") {
        cfg.exponent_span = ExponentSpan::active_span;
      } else {
        throw field_error("/options/exponent_span", "expected \"interval\" or \"active_span\"");
      }
    }
  }
  try {
    cfg.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return cfg;
}

inline SweepSpec parse_sweep(const json& doc) {
  using namespace detail;
  SweepSpec spec;
  spec.problem = parse_problem(doc);
  const json& sw = require(doc, "sweep", "");
  const std::string var = string(require(sw, "variable", "/sweep"), "/sweep/variable");
  if (var == "p_a") {
    spec.variable = SweepVariable::p_a;
  } else if (var == "p_cu") {
    spec.variable = SweepVariable::p_cu;
  } else if (var == "theta2") {
    spec.variable = SweepVariable::theta2;
  } else {
    throw field_error("/sweep/variable", "expected p_a, p_cu or theta2");
  }
  std::string unit = spec.variable == SweepVariable::theta2 ? "linear" : "db";
  if (sw.contains("unit")) {
    unit = string(sw.at("unit"), "/sweep/unit");
  }
  if (unit != "db" && unit != "watts" && unit != "linear") {
    throw field_error("/sweep/unit", "expected db, watts or linear");
  }
  if (spec.variable == SweepVariable::theta2 && unit == "db") {
    throw field_error("/sweep/unit", "theta2 values are linear");
  }
  spec.labels = numbers(require(sw, "values", "/sweep"), "/sweep/values");
  for (double v : spec.labels) {
    spec.values.push_back(unit == "db" ? db_to_watts(v) : v);
  }
  const json& cases = require(sw, "cases", "/sweep");
  if (!cases.is_array()) {
    throw field_error("/sweep/cases", "expected an array of case names");
  }
  for (std::size_t k = 0; k < cases.size(); ++k) {
    const std::string path = "/sweep/cases/" + std::to_string(k);
    spec.cases.push_back(case_kind(string(cases[k], path), path));
  }
  if (sw.contains("threads")) {
    spec.threads = static_cast<unsigned>(number(sw.at("threads"), "/sweep/threads"));
  }
  spec.validate();
  return spec;
}

/// Parses JSON text; syntax errors report line and column.
inline json parse_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    int line = 1;
    int column = 1;
    for (std::size_t k = 0; k + 1 < e.byte && k < text.size(); ++k) {
      if (text[k] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ConfigError("config syntax error at line " + std::to_string(line) + ", column " +
                      std::to_string(column) + ": " + e.what());
  }
}

inline json read_stream(std::istream& in) {
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_text(ss.str());
}

}  // namespace wpcn::config

#endif  // WPCN_CONFIG_HPP
