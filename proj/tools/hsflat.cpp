#include <iostream>

#include <CLI11.hpp>

#include "hsflat/cli/runner.hpp"

int main(int argc, char** argv) {
  using namespace hsflat;
  CLI::App app{"Flat Hele-Shaw experiments: simulation, hodograph analysis, lemma verifiers"};
  app.require_subcommand(1);
  RunRequest req;
  std::string config, out;
  app.add_option("--out", out, "output directory (default: $" + std::string(kOutRootEnv) + "/<command>)");
  app.add_option("--threads", req.threads, "worker threads for the acceptance suite")->check(CLI::PositiveNumber);
  app.add_flag("--strict", req.strict, "treat warnings as failures");
  app.fallthrough();

  std::vector<CLI::App*> subs;
  for (const auto& name : kind_names()) {
    auto* s = app.add_subcommand(name, "run the " + name + " experiment");
    s->add_option("--config", config, "experiment config file")->check(CLI::ExistingFile);
    subs.push_back(s);
  }
  auto* all = app.add_subcommand("all", "run the acceptance suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : exit_config;
  }
  if (!out.empty()) req.out = out;
  if (!config.empty()) req.config = config;
  if (!all->parsed())
    for (std::size_t i = 0; i < subs.size(); ++i)
      if (subs[i]->parsed()) req.kind = static_cast<Kind>(i);

  const auto res = execute(req, std::cout);
  std::cout << "manifest: " << (res.out / "manifest.json").string() << "\n";
  return res.exit_code;
}
