#pragma once

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hsflat/cli/config.hpp"
#include "hsflat/cli/experiments.hpp"
#include "hsflat/core/io.hpp"

namespace hsflat {

enum ExitCode { exit_ok = 0, exit_config = 2, exit_numeric = 3, exit_assertion = 4 };

inline constexpr const char* kOutRootEnv = "HSFLAT_OUT_ROOT";

struct RunRequest {
  std::optional<Kind> kind;  // empty: acceptance suite
  std::optional<std::filesystem::path> config;
  std::optional<std::filesystem::path> out;
  int threads = 1;
  bool strict = false;
};

struct RunOutcome {
  int exit_code = exit_ok;
  std::filesystem::path out;
  std::vector<ExperimentResult> results;
  std::string message;
};

namespace detail {

inline std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// --out, then output.dir, then $HSFLAT_OUT_ROOT/<name>, then ./hsflat_out/<name>.
inline std::filesystem::path resolve_out(const RunRequest& req, const std::string& cfg_dir,
                                         const std::string& name) {
  if (req.out) return *req.out;
  if (!cfg_dir.empty()) return cfg_dir;
  if (const char* root = std::getenv(kOutRootEnv); root && *root) return std::filesystem::path(root) / name;
  return std::filesystem::path("hsflat_out") / name;
}

inline void write_result(const std::filesystem::path& dir, const ExperimentResult& r) {
  for (const auto& d : r.datasets) io::write_file_atomic(dir / d.name, d.contents);
  nlohmann::json rep = {{"experiment", to_string(r.kind)}, {"label", r.label},
                        {"summary", r.summary}, {"checks", checks_json(r)}};
  io::write_json(dir / "report.json", rep);
}

} // namespace detail

/// Runs one experiment or the acceptance suite, writes datasets and the manifest.
/// Errors are mapped onto exit codes: configuration 2, numerical 3, failed assertion 4.
inline RunOutcome execute(const RunRequest& req, std::ostream& log) {
  RunOutcome res;
  const std::string started = detail::utc_now();
  const std::string name = req.kind ? to_string(*req.kind) : "all";
  std::vector<std::pair<std::string, RunConfig>> members;
  nlohmann::json config_echo;
  std::string hash;
  try {
    if (req.kind) {
      RunConfig c = req.config ? parse_config(*req.config, req.kind) : defaults_for(*req.kind);
      res.out = detail::resolve_out(req, c.out_dir, name);
      members.emplace_back(name, c);
      config_echo = to_json(c);
      hash = config_hash(c);
    } else {
      if (req.config) throw ConfigError({"'all' runs the built-in acceptance suite and takes no --config"});
      members = acceptance_suite();
      res.out = detail::resolve_out(req, "", name);
      config_echo = nlohmann::json::object();
      std::string joined;
      for (const auto& [label, c] : members) {
        config_echo[label] = to_json(c);
        joined += config_hash(c);
      }
      char buf[17];
      std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(joined)));
      hash = buf;
    }
  } catch (const InvalidArgument& e) {
    res.exit_code = exit_config;
    res.message = e.what();
    log << "config error: " << e.what() << "\n";
    return res;
  }

  try {
    if (req.kind) {
      res.results.push_back(run_experiment(members.front().second));
      res.results.back().label = name;
    } else {
      res.results = run_suite(members, req.threads);
    }
  } catch (const InvalidArgument& e) {
    res.exit_code = exit_config;
    res.message = e.what();
  } catch (const NumericError& e) {
    res.exit_code = exit_numeric;
    res.message = e.what();
  } catch (const AssertionFailure& e) {
    res.exit_code = exit_assertion;
    res.message = e.what();
  } catch (const std::exception& e) {
    res.exit_code = exit_numeric;
    res.message = e.what();
  }

  nlohmann::json stages = nlohmann::json::array(), checks = nlohmann::json::array();
  bool all_pass = res.exit_code == exit_ok;
  for (const auto& r : res.results) {
    const auto dir = req.kind ? res.out : res.out / r.label;
    detail::write_result(dir, r);
    for (const auto& [stage, sec] : r.stages)
      stages.push_back({{"experiment", r.label}, {"stage", stage}, {"seconds", sec}});
    for (const auto& c : r.checks) {
      checks.push_back({{"experiment", r.label}, {"criterion", c.criterion}, {"name", c.name},
                        {"passed", c.passed}, {"warning", c.warning}, {"detail", c.detail}});
      const bool counts = !c.warning || req.strict;
      if (!c.passed && counts) all_pass = false;
      log << (c.passed ? "PASS " : (counts ? "FAIL " : "WARN ")) << r.label << ": " << c.name << " -- "
          << c.detail << "\n";
    }
  }
  if (res.exit_code == exit_ok && !all_pass) res.exit_code = exit_assertion;
  if (!res.message.empty()) log << "error: " << res.message << "\n";

  nlohmann::json manifest = {
      {"config_hash", hash},
      {"version", kVersion},
      {"command", name},
      {"started", started},
      {"finished", detail::utc_now()},
      {"threads", req.threads},
      {"strict", req.strict},
      {"config", config_echo},
      {"stages", stages},
      {"checks", checks},
      {"passed", all_pass},
      {"exit_code", res.exit_code},
  };
  if (!res.message.empty()) manifest["error"] = res.message;
  io::write_json(res.out / "manifest.json", manifest);
  return res;
}

} // namespace hsflat
