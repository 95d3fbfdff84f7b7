// Runs the acceptance suite twice and prints one line per criterion.
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "hsflat/cli/runner.hpp"

using namespace hsflat;
namespace fs = std::filesystem;

namespace {

const char* kTitles[] = {
    "",
    "planar exactness",
    "dispersion and half-Laplacian limit",
    "linearization gap slope",
    "oscillation decay",
    "bootstrap ladder",
    "gradient Hoelder across a rate jump",
    "sup-convolution battery",
    "interpolation lemmas",
    "barrier",
    "deformations",
    "determinism",
};

std::map<std::string, std::string> datasets(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file() || e.path().filename() == "manifest.json") continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    out[fs::relative(e.path(), root).string()] = ss.str();
  }
  return out;
}

} // namespace

int main() {
  char tmpl[] = "/tmp/hsflat_acceptance_XXXXXX";
  const fs::path root = mkdtemp(tmpl);
  std::ostringstream log;

  RunRequest first;
  first.out = root / "run1";
  const auto r1 = execute(first, log);
  RunRequest second;
  second.out = root / "run2";
  second.threads = 2;
  const auto r2 = execute(second, log);

  std::map<int, std::pair<bool, std::string>> crit;
  for (int k = 1; k <= 10; ++k) crit[k] = {true, ""};
  std::map<int, int> seen;
  for (const auto& r : r1.results)
    for (const auto& c : r.checks) {
      if (c.criterion < 1 || c.criterion > 10) continue;
      ++seen[c.criterion];
      auto& [ok, detail] = crit[c.criterion];
      if (!c.passed) {
        ok = false;
        detail += (detail.empty() ? "" : "; ") + r.label + ": " + c.name + " -- " + c.detail;
      }
    }
  for (int k = 1; k <= 10; ++k) {
    if (!seen[k]) crit[k] = {false, "no check recorded"};
    else if (crit[k].second.empty()) crit[k].second = std::to_string(seen[k]) + " checks";
  }

  const auto a = datasets(root / "run1"), b = datasets(root / "run2");
  std::string diff;
  for (const auto& [name, body] : a) {
    const auto it = b.find(name);
    if (it == b.end() || it->second != body) diff += (diff.empty() ? "" : ", ") + name;
  }
  for (const auto& [name, body] : b)
    if (!a.count(name)) diff += (diff.empty() ? "" : ", ") + name;
  crit[11] = {diff.empty() && !a.empty(),
              diff.empty() ? std::to_string(a.size()) + " files byte-identical (threads 1 vs 2)" : "differ: " + diff};

  bool all = r1.exit_code == exit_ok && r2.exit_code == exit_ok;
  for (const auto& [k, v] : crit) {
    std::printf("criterion %2d %-38s %s  %s\n", k, kTitles[k], v.first ? "PASS" : "FAIL", v.second.c_str());
    all = all && v.first;
  }
  if (r1.exit_code != exit_ok) std::printf("suite exit code %d: %s\n", r1.exit_code, r1.message.c_str());
  fs::remove_all(root);
  return all ? 0 : 1;
}
