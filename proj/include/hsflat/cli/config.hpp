#pragma once

#include <cctype>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "hsflat/core/error.hpp"

namespace hsflat {

inline constexpr const char* kVersion = "0.3.0";

enum class Kind { simulate, linearize, harnack, ladder, supconv, deform, barrier, interp };

inline const std::vector<std::string>& kind_names() {
  static const std::vector<std::string> names{"simulate", "linearize", "harnack", "ladder",
                                              "supconv",  "deform",    "barrier", "interp"};
  return names;
}
inline std::string to_string(Kind k) { return kind_names()[static_cast<int>(k)]; }
inline Kind kind_from_string(const std::string& s) {
  const auto& n = kind_names();
  for (std::size_t i = 0; i < n.size(); ++i)
    if (n[i] == s) return static_cast<Kind>(i);
  throw InvalidArgument("unknown experiment kind '" + s + "'");
}

/// One experiment description. Defaults depend on the kind (see defaults_for).
struct RunConfig {
  Kind kind = Kind::simulate;
  long seed = 1;

  // grid
  int nx = 128;
  int ny = 48;
  double length = 2.0 * 3.14159265358979323846;

  // physics
  double H = 2.0;
  double gamma0 = 0.0;
  double eps = 0.05;
  std::vector<double> eps_sweep;

  // time
  double T = 1.0;
  double dt = 1e-3;
  int snapshot_every = 10;
  std::vector<double> a_values{1.0};
  std::vector<double> a_starts{0.0};

  // init: flat data gamma = gamma0 - eps * sum amp cos(k x + phase)
  std::vector<int> modes;
  std::vector<double> amplitudes;
  std::vector<double> phases;
  std::vector<int> dispersion_modes;
  double dispersion_amplitude = 1e-3;
  double dispersion_T = 0.5;

  // analysis
  double mu = 0.5;
  double trunc_C = 4.0;
  double rho0 = 2.0;
  double alpha_cfg = 0.0;  // 0: take min(fitted alpha, 1/4)
  double ladder_radius = 1.0;
  int refine = 2;

  // gradient: single-mode run with a(t) jumping at mid-run
  bool grad_enabled = true;
  int grad_mode = 2;
  double grad_T = 0.06;
  double grad_dt = 1e-3;
  std::vector<double> grad_a{1.0, 2.0};

  // supconv
  double xi = 0.25;
  double tau = 0.04;
  std::vector<double> taus{0.04, 0.01, 0.0025};
  int trials = 100;
  int conv_nx = 64;
  int conv_nt = 41;

  // deform
  double B = 1.5;
  std::vector<double> shear_p{1.0, 0.5};
  std::vector<double> epsN_sweep{0.1, 0.03, 0.01};
  double sample_h = 0.01;
  double eval_h = 0.05;

  // barrier
  std::vector<double> r_values{0.01, 0.02, 0.04};
  int dimension = 2;
  double ode_c = 1.0;
  double ode_C = 2.0;

  // interp
  int interp_trials = 1000;
  int interp_n = 64;
  double interp_alpha = 0.5;
  double interp_beta = 0.7;
  double interp_h0 = 0.0;
  double a3_alpha = 0.2;
  double a3_beta = 0.3;

  // output
  std::string out_dir;
  bool binary = false;
};

inline RunConfig defaults_for(Kind k) {
  RunConfig c;
  c.kind = k;
  switch (k) {
    case Kind::simulate:
      c.nx = 64;
      c.ny = 16;
      c.T = 1.0;
      c.dt = 1.0 / 128.0;
      c.snapshot_every = 16;
      break;
    case Kind::linearize:
      c.nx = 128;
      c.ny = 48;
      c.T = 0.5;
      c.dt = 5e-4;
      c.snapshot_every = 10;
      c.eps_sweep = {0.1, 0.05, 0.025};
      c.a_values = {1.0, 1.5};
      c.a_starts = {0.0, 0.25};
      c.modes = {1, 2, 3};
      c.amplitudes = {0.5, 0.3, 0.2};
      c.phases = {0.0, 0.7, 1.9};
      break;
    case Kind::harnack:
      c.nx = 128;
      c.ny = 32;
      c.T = 2.0;
      c.dt = 2e-3;
      c.snapshot_every = 10;
      c.modes = {1, 2, 3};
      c.amplitudes = {0.5, 0.3, 0.2};
      c.phases = {0.0, 0.7, 1.9};
      break;
    case Kind::ladder:
      c.nx = 128;
      c.ny = 32;
      c.T = 1.0;
      c.dt = 2e-3;
      c.snapshot_every = 25;
      c.modes = {1, 2, 3};
      c.amplitudes = {0.5, 0.3, 0.2};
      c.phases = {0.0, 0.7, 1.9};
      break;
    default:
      break;
  }
  return c;
}

struct ConfigError : InvalidArgument {
  std::vector<std::string> violations;
  explicit ConfigError(std::vector<std::string> v)
      : InvalidArgument(join(v)), violations(std::move(v)) {}
  static std::string join(const std::vector<std::string>& v) {
    std::string s = "invalid configuration:";
    for (const auto& e : v) s += "\n  " + e;
    return s;
  }
};

namespace detail {

using ConfigValue = std::variant<double, bool, std::string, std::vector<double>, std::vector<std::string>>;

struct RawEntry {
  ConfigValue value;
  bool is_integer = false;       // scalar or every list element written without '.', 'e'
  int line = 0, column = 0;
};

inline std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

inline bool parse_number(const std::string& s, double& out, bool& integer) {
  if (s.empty()) return false;
  std::size_t pos = 0;
  try {
    out = std::stod(s, &pos);
  } catch (...) {
    return false;
  }
  integer = s.find_first_of(".eEnN") == std::string::npos;
  return pos == s.size() && std::isfinite(out);
}

// Parses a scalar or list literal; returns an error message or "".
inline std::string parse_value(const std::string& text, RawEntry& e) {
  if (text.empty()) return "missing value";
  if (text.front() == '[') {
    if (text.back() != ']') return "unterminated list";
    const std::string body = trim(text.substr(1, text.size() - 2));
    std::vector<double> nums;
    std::vector<std::string> strs;
    bool all_int = true;
    if (!body.empty()) {
      std::stringstream ss(body);
      std::string item;
      while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.size() >= 2 && item.front() == '"' && item.back() == '"') {
          strs.push_back(item.substr(1, item.size() - 2));
          continue;
        }
        double v;
        bool integer;
        if (!parse_number(item, v, integer)) return "bad list element '" + item + "'";
        all_int = all_int && integer;
        nums.push_back(v);
      }
    }
    if (!nums.empty() && !strs.empty()) return "list mixes numbers and strings";
    if (!strs.empty()) e.value = strs;
    else e.value = nums;
    e.is_integer = all_int;
    return "";
  }
  if (text.front() == '"') {
    if (text.size() < 2 || text.back() != '"') return "unterminated string";
    e.value = text.substr(1, text.size() - 2);
    return "";
  }
  if (text == "true" || text == "false") {
    e.value = text == "true";
    return "";
  }
  double v;
  bool integer;
  if (!parse_number(text, v, integer)) return "cannot parse value '" + text + "'";
  e.value = v;
  e.is_integer = integer;
  return "";
}

// Strips a trailing comment that is not inside a string.
inline std::string strip_comment(const std::string& line) {
  bool in_str = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_str = !in_str;
    if (!in_str && (line[i] == '#' || line[i] == ';')) return line.substr(0, i);
  }
  return line;
}

struct Field {
  enum Type { Int, Real, Bool, Str, RealList, IntList } type;
  std::function<void(RunConfig&, const ConfigValue&)> set;
  std::function<std::string(const RunConfig&)> check;  // "" if valid
};

inline std::map<std::string, Field>& schema() {
  using F = Field;
  auto real = [](double RunConfig::*m) {
    return [m](RunConfig& c, const ConfigValue& v) { c.*m = std::get<double>(v); };
  };
  auto integer = [](int RunConfig::*m) {
    return [m](RunConfig& c, const ConfigValue& v) { c.*m = static_cast<int>(std::get<double>(v)); };
  };
  auto rlist = [](std::vector<double> RunConfig::*m) {
    return [m](RunConfig& c, const ConfigValue& v) { c.*m = std::get<std::vector<double>>(v); };
  };
  auto ilist = [](std::vector<int> RunConfig::*m) {
    return [m](RunConfig& c, const ConfigValue& v) {
      (c.*m).clear();
      for (double x : std::get<std::vector<double>>(v)) (c.*m).push_back(static_cast<int>(x));
    };
  };
  auto positive = [](double RunConfig::*m, const char* name) {
    return [m, name](const RunConfig& c) {
      return c.*m > 0.0 ? std::string() : std::string(name) + " must be positive";
    };
  };
  auto positive_i = [](int RunConfig::*m, const char* name) {
    return [m, name](const RunConfig& c) {
      return c.*m > 0 ? std::string() : std::string(name) + " must be positive";
    };
  };
  auto none = [](const RunConfig&) { return std::string(); };
  auto all_positive = [](std::vector<double> RunConfig::*m, const char* name) {
    return [m, name](const RunConfig& c) {
      for (double v : c.*m)
        if (!(v > 0.0)) return std::string(name) + " entries must be positive";
      return std::string();
    };
  };

  static std::map<std::string, Field> s{
      {"run.kind", {F::Str, [](RunConfig& c, const ConfigValue& v) { c.kind = kind_from_string(std::get<std::string>(v)); }, none}},
      {"run.seed", {F::Int, [](RunConfig& c, const ConfigValue& v) { c.seed = static_cast<long>(std::get<double>(v)); }, none}},
      {"grid.nx", {F::Int, integer(&RunConfig::nx), [](const RunConfig& c) {
         return c.nx >= 8 && (c.nx & (c.nx - 1)) == 0 ? std::string() : std::string("grid.nx must be a power of two >= 8");
       }}},
      {"grid.ny", {F::Int, integer(&RunConfig::ny), [](const RunConfig& c) {
         return c.ny >= 8 ? std::string() : std::string("grid.ny must be >= 8");
       }}},
      {"grid.length", {F::Real, real(&RunConfig::length), positive(&RunConfig::length, "grid.length")}},
      {"physics.H", {F::Real, real(&RunConfig::H), positive(&RunConfig::H, "physics.H")}},
      {"physics.gamma0", {F::Real, real(&RunConfig::gamma0), none}},
      {"physics.eps", {F::Real, real(&RunConfig::eps), [](const RunConfig& c) {
         return c.eps > 0.0 && c.eps < 1.0 ? std::string() : std::string("physics.eps must lie in (0,1)");
       }}},
      {"physics.eps_sweep", {F::RealList, rlist(&RunConfig::eps_sweep), all_positive(&RunConfig::eps_sweep, "physics.eps_sweep")}},
      {"time.T", {F::Real, real(&RunConfig::T), [](const RunConfig& c) {
         return c.T >= 0.0 ? std::string() : std::string("time.T must be >= 0");
       }}},
      {"time.dt", {F::Real, real(&RunConfig::dt), positive(&RunConfig::dt, "time.dt")}},
      {"time.snapshot_every", {F::Int, integer(&RunConfig::snapshot_every), positive_i(&RunConfig::snapshot_every, "time.snapshot_every")}},
      {"time.a_values", {F::RealList, rlist(&RunConfig::a_values), [](const RunConfig& c) {
         if (c.a_values.empty()) return std::string("time.a_values must not be empty");
         for (double v : c.a_values)
           if (!(v > 0.0)) return std::string("time.a_values entries must be positive");
         return c.a_values.size() == c.a_starts.size() ? std::string()
                                                        : std::string("time.a_values and time.a_starts differ in length");
       }}},
      {"time.a_starts", {F::RealList, rlist(&RunConfig::a_starts), [](const RunConfig& c) {
         for (std::size_t i = 1; i < c.a_starts.size(); ++i)
           if (!(c.a_starts[i] > c.a_starts[i - 1])) return std::string("time.a_starts must increase");
         return std::string();
       }}},
      {"init.modes", {F::IntList, ilist(&RunConfig::modes), [](const RunConfig& c) {
         for (int k : c.modes)
           if (k < 1 || 2 * k >= c.nx) return std::string("init.modes entries must lie in [1, nx/2)");
         if (c.amplitudes.size() != c.modes.size()) return std::string("init.amplitudes must match init.modes");
         if (!c.phases.empty() && c.phases.size() != c.modes.size()) return std::string("init.phases must match init.modes");
         return std::string();
       }}},
      {"init.amplitudes", {F::RealList, rlist(&RunConfig::amplitudes), none}},
      {"init.phases", {F::RealList, rlist(&RunConfig::phases), none}},
      {"init.dispersion_modes", {F::IntList, ilist(&RunConfig::dispersion_modes), [](const RunConfig& c) {
         for (int k : c.dispersion_modes)
           if (k < 1 || 2 * k >= c.nx) return std::string("init.dispersion_modes entries must lie in [1, nx/2)");
         return std::string();
       }}},
      {"init.dispersion_amplitude", {F::Real, real(&RunConfig::dispersion_amplitude), positive(&RunConfig::dispersion_amplitude, "init.dispersion_amplitude")}},
      {"init.dispersion_T", {F::Real, real(&RunConfig::dispersion_T), positive(&RunConfig::dispersion_T, "init.dispersion_T")}},
      {"analysis.mu", {F::Real, real(&RunConfig::mu), [](const RunConfig& c) {
         return c.mu > 0.0 && c.mu < 1.0 ? std::string() : std::string("analysis.mu must lie in (0,1)");
       }}},
      {"analysis.trunc_C", {F::Real, real(&RunConfig::trunc_C), positive(&RunConfig::trunc_C, "analysis.trunc_C")}},
      {"analysis.rho0", {F::Real, real(&RunConfig::rho0), positive(&RunConfig::rho0, "analysis.rho0")}},
      {"analysis.alpha_cfg", {F::Real, real(&RunConfig::alpha_cfg), [](const RunConfig& c) {
         return c.alpha_cfg >= 0.0 && c.alpha_cfg <= 1.0 ? std::string() : std::string("analysis.alpha_cfg must lie in [0,1]");
       }}},
      {"analysis.ladder_radius", {F::Real, real(&RunConfig::ladder_radius), positive(&RunConfig::ladder_radius, "analysis.ladder_radius")}},
      {"analysis.refine", {F::Int, integer(&RunConfig::refine), [](const RunConfig& c) {
         return c.refine == 1 || c.refine == 2 ? std::string() : std::string("analysis.refine must be 1 or 2");
       }}},
      {"gradient.enabled", {F::Bool, [](RunConfig& c, const ConfigValue& v) { c.grad_enabled = std::get<bool>(v); }, none}},
      {"gradient.mode", {F::Int, integer(&RunConfig::grad_mode), [](const RunConfig& c) {
         return c.grad_mode >= 1 && 2 * c.grad_mode < c.nx ? std::string() : std::string("gradient.mode must lie in [1, nx/2)");
       }}},
      {"gradient.T", {F::Real, real(&RunConfig::grad_T), positive(&RunConfig::grad_T, "gradient.T")}},
      {"gradient.dt", {F::Real, real(&RunConfig::grad_dt), positive(&RunConfig::grad_dt, "gradient.dt")}},
      {"gradient.a", {F::RealList, rlist(&RunConfig::grad_a), [](const RunConfig& c) {
         return c.grad_a.size() == 2 && c.grad_a[0] > 0.0 && c.grad_a[1] > 0.0
                    ? std::string() : std::string("gradient.a must hold two positive values");
       }}},
      {"supconv.xi", {F::Real, real(&RunConfig::xi), positive(&RunConfig::xi, "supconv.xi")}},
      {"supconv.tau", {F::Real, real(&RunConfig::tau), positive(&RunConfig::tau, "supconv.tau")}},
      {"supconv.taus", {F::RealList, rlist(&RunConfig::taus), all_positive(&RunConfig::taus, "supconv.taus")}},
      {"supconv.trials", {F::Int, integer(&RunConfig::trials), positive_i(&RunConfig::trials, "supconv.trials")}},
      {"supconv.nx", {F::Int, integer(&RunConfig::conv_nx), [](const RunConfig& c) {
         return c.conv_nx >= 8 && (c.conv_nx & (c.conv_nx - 1)) == 0 ? std::string() : std::string("supconv.nx must be a power of two >= 8");
       }}},
      {"supconv.nt", {F::Int, integer(&RunConfig::conv_nt), [](const RunConfig& c) {
         return c.conv_nt >= 3 ? std::string() : std::string("supconv.nt must be >= 3");
       }}},
      {"deform.B", {F::Real, real(&RunConfig::B), [](const RunConfig& c) {
         return c.B > 1.0 ? std::string() : std::string("deform.B must exceed 1");
       }}},
      {"deform.p", {F::RealList, rlist(&RunConfig::shear_p), [](const RunConfig& c) {
         return c.shear_p.size() == 2 ? std::string() : std::string("deform.p must have 2 entries");
       }}},
      {"deform.epsN_sweep", {F::RealList, rlist(&RunConfig::epsN_sweep), [](const RunConfig& c) {
         for (double v : c.epsN_sweep)
           if (!(v > 0.0 && v < 1.0)) return std::string("deform.epsN_sweep entries must lie in (0,1)");
         return std::string();
       }}},
      {"deform.sample_h", {F::Real, real(&RunConfig::sample_h), positive(&RunConfig::sample_h, "deform.sample_h")}},
      {"deform.eval_h", {F::Real, real(&RunConfig::eval_h), positive(&RunConfig::eval_h, "deform.eval_h")}},
      {"barrier.r_values", {F::RealList, rlist(&RunConfig::r_values), [](const RunConfig& c) {
         for (double v : c.r_values)
           if (!(v > 0.0 && v < 0.05)) return std::string("barrier.r_values entries must lie in (0, 0.05)");
         return std::string();
       }}},
      {"barrier.dimension", {F::Int, integer(&RunConfig::dimension), [](const RunConfig& c) {
         return c.dimension == 2 || c.dimension == 3 ? std::string() : std::string("barrier.dimension must be 2 or 3");
       }}},
      {"barrier.ode_c", {F::Real, real(&RunConfig::ode_c), positive(&RunConfig::ode_c, "barrier.ode_c")}},
      {"barrier.ode_C", {F::Real, real(&RunConfig::ode_C), positive(&RunConfig::ode_C, "barrier.ode_C")}},
      {"interp.trials", {F::Int, integer(&RunConfig::interp_trials), positive_i(&RunConfig::interp_trials, "interp.trials")}},
      {"interp.n", {F::Int, integer(&RunConfig::interp_n), [](const RunConfig& c) {
         return c.interp_n >= 8 && c.interp_n % 2 == 0 ? std::string() : std::string("interp.n must be even and >= 8");
       }}},
      {"interp.alpha", {F::Real, real(&RunConfig::interp_alpha), positive(&RunConfig::interp_alpha, "interp.alpha")}},
      {"interp.beta", {F::Real, real(&RunConfig::interp_beta), [](const RunConfig& c) {
         return c.interp_alpha + c.interp_beta > 1.0 && c.interp_beta < 1.0 && c.interp_alpha < 1.0
                    ? std::string() : std::string("interp.alpha + interp.beta must exceed 1, each below 1");
       }}},
      {"interp.h0", {F::Real, real(&RunConfig::interp_h0), [](const RunConfig& c) {
         return c.interp_h0 >= 0.0 && c.interp_h0 < 1.0 ? std::string() : std::string("interp.h0 must lie in [0,1)");
       }}},
      {"interp.a3_alpha", {F::Real, real(&RunConfig::a3_alpha), positive(&RunConfig::a3_alpha, "interp.a3_alpha")}},
      {"interp.a3_beta", {F::Real, real(&RunConfig::a3_beta), [](const RunConfig& c) {
         return c.a3_beta > 0.0 && c.a3_alpha + c.a3_beta < 1.0 ? std::string() : std::string("interp.a3_alpha + interp.a3_beta must lie below 1");
       }}},
      {"output.dir", {F::Str, [](RunConfig& c, const ConfigValue& v) { c.out_dir = std::get<std::string>(v); }, none}},
      {"output.binary", {F::Bool, [](RunConfig& c, const ConfigValue& v) { c.binary = std::get<bool>(v); }, none}},
  };
  return s;
}

inline const char* type_name(Field::Type t) {
  switch (t) {
    case Field::Int: return "integer";
    case Field::Real: return "number";
    case Field::Bool: return "boolean";
    case Field::Str: return "string";
    case Field::RealList: return "list of numbers";
    case Field::IntList: return "list of integers";
  }
  return "?";
}

inline bool type_matches(Field::Type t, const RawEntry& e) {
  switch (t) {
    case Field::Int: return std::holds_alternative<double>(e.value) && e.is_integer;
    case Field::Real: return std::holds_alternative<double>(e.value);
    case Field::Bool: return std::holds_alternative<bool>(e.value);
    case Field::Str: return std::holds_alternative<std::string>(e.value);
    case Field::RealList: return std::holds_alternative<std::vector<double>>(e.value);
    case Field::IntList: return std::holds_alternative<std::vector<double>>(e.value) && e.is_integer;
  }
  return false;
}

} // namespace detail

/// Parses the sectioned key = value format. Every violation is collected, each with
/// its line and column, and reported together.
inline RunConfig parse_config_text(const std::string& text, std::optional<Kind> kind_hint = {}) {
  std::vector<std::string> errors;
  std::map<std::string, detail::RawEntry> entries;
  std::vector<std::string> order;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  auto err = [&](int l, int c, const std::string& m) {
    errors.push_back("line " + std::to_string(l) + ", column " + std::to_string(c) + ": " + m);
  };
  while (std::getline(in, line)) {
    ++lineno;
    const std::string body = detail::strip_comment(line);
    const std::string t = detail::trim(body);
    if (t.empty()) continue;
    const int col = static_cast<int>(body.find_first_not_of(" \t")) + 1;
    if (t.front() == '[' && t.find('=') == std::string::npos) {
      if (t.back() != ']') {
        err(lineno, col, "unterminated section header");
        continue;
      }
      section = detail::trim(t.substr(1, t.size() - 2));
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      err(lineno, col, "expected 'key = value'");
      continue;
    }
    const std::string key = detail::trim(body.substr(0, eq));
    const std::string full = section.empty() ? key : section + "." + key;
    const std::string value = detail::trim(body.substr(eq + 1));
    const int vcol = static_cast<int>(body.find_first_not_of(" \t", eq + 1)) + 1;
    if (!detail::schema().count(full)) {
      err(lineno, col, "unknown key '" + full + "'");
      continue;
    }
    if (entries.count(full)) {
      err(lineno, col, "duplicate key '" + full + "'");
      continue;
    }
    detail::RawEntry e;
    e.line = lineno;
    e.column = vcol > 0 ? vcol : col;
    if (auto m = detail::parse_value(value, e); !m.empty()) {
      err(lineno, e.column, m + " for '" + full + "'");
      continue;
    }
    const auto& f = detail::schema().at(full);
    if (!detail::type_matches(f.type, e)) {
      err(lineno, e.column, "'" + full + "' expects " + detail::type_name(f.type));
      continue;
    }
    entries[full] = e;
    order.push_back(full);
  }

  Kind kind = kind_hint.value_or(Kind::simulate);
  if (auto it = entries.find("run.kind"); it != entries.end()) {
    try {
      kind = kind_from_string(std::get<std::string>(it->second.value));
    } catch (const InvalidArgument& ex) {
      err(it->second.line, it->second.column, ex.what());
    }
    if (kind_hint && kind != *kind_hint)
      err(it->second.line, it->second.column,
          "run.kind '" + to_string(kind) + "' does not match the subcommand '" + to_string(*kind_hint) + "'");
  }
  RunConfig cfg = defaults_for(kind);
  for (const auto& key : order) {
    if (key == "run.kind") continue;
    try {
      detail::schema().at(key).set(cfg, entries.at(key).value);
    } catch (const std::exception& ex) {
      err(entries.at(key).line, entries.at(key).column, ex.what());
    }
  }
  // Field-level validation after all values are in, so cross-field rules see the final state.
  for (const auto& [key, field] : detail::schema()) {
    const auto msg = field.check(cfg);
    if (msg.empty()) continue;
    if (auto it = entries.find(key); it != entries.end())
      err(it->second.line, it->second.column, msg);
    else
      errors.push_back(key + ": " + msg);
  }
  if (!errors.empty()) throw ConfigError(errors);
  return cfg;
}

inline RunConfig parse_config(const std::filesystem::path& path, std::optional<Kind> kind_hint = {}) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot open config file '" + path.string() + "'"});
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), kind_hint);
}

/// Canonical JSON echo of every field; the config hash is computed over its compact dump.
inline nlohmann::json to_json(const RunConfig& c) {
  return {
      {"run", {{"kind", to_string(c.kind)}, {"seed", c.seed}}},
      {"grid", {{"nx", c.nx}, {"ny", c.ny}, {"length", c.length}}},
      {"physics", {{"H", c.H}, {"gamma0", c.gamma0}, {"eps", c.eps}, {"eps_sweep", c.eps_sweep}}},
      {"time", {{"T", c.T}, {"dt", c.dt}, {"snapshot_every", c.snapshot_every},
                {"a_values", c.a_values}, {"a_starts", c.a_starts}}},
      {"init", {{"modes", c.modes}, {"amplitudes", c.amplitudes}, {"phases", c.phases},
                {"dispersion_modes", c.dispersion_modes}, {"dispersion_amplitude", c.dispersion_amplitude},
                {"dispersion_T", c.dispersion_T}}},
      {"analysis", {{"mu", c.mu}, {"trunc_C", c.trunc_C}, {"rho0", c.rho0}, {"alpha_cfg", c.alpha_cfg},
                    {"ladder_radius", c.ladder_radius}, {"refine", c.refine}}},
      {"gradient", {{"enabled", c.grad_enabled}, {"mode", c.grad_mode}, {"T", c.grad_T},
                    {"dt", c.grad_dt}, {"a", c.grad_a}}},
      {"supconv", {{"xi", c.xi}, {"tau", c.tau}, {"taus", c.taus}, {"trials", c.trials},
                   {"nx", c.conv_nx}, {"nt", c.conv_nt}}},
      {"deform", {{"B", c.B}, {"p", c.shear_p}, {"epsN_sweep", c.epsN_sweep},
                  {"sample_h", c.sample_h}, {"eval_h", c.eval_h}}},
      {"barrier", {{"r_values", c.r_values}, {"dimension", c.dimension}, {"ode_c", c.ode_c}, {"ode_C", c.ode_C}}},
      {"interp", {{"trials", c.interp_trials}, {"n", c.interp_n}, {"alpha", c.interp_alpha},
                  {"beta", c.interp_beta}, {"h0", c.interp_h0}, {"a3_alpha", c.a3_alpha}, {"a3_beta", c.a3_beta}}},
      {"output", {{"dir", c.out_dir}, {"binary", c.binary}}},
  };
}

inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

/// Hash of the canonical config; the output directory is excluded so that the same
/// experiment written to different places hashes equally.
inline std::string config_hash(const RunConfig& c) {
  auto j = to_json(c);
  j["output"].erase("dir");
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(j.dump())));
  return buf;
}

} // namespace hsflat
