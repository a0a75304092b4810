// mspace: command-line front end for the scenario commands.

#include <iostream>
#include <optional>
#include <utility>
#include <string>

#include <CLI11.hpp>

#include "mspace/scenario.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Sampling sets and reverse Carleson measures in model spaces"};
  app.require_subcommand(1);
  std::string config, out = "out";
  std::optional<std::uint64_t> seed;
  unsigned jobs = 1;
  const std::pair<const char*, const char*> commands[] = {
      {"covering", "build the interval covering from the level set"},
      {"density", "relative density of Gamma against the covering"},
      {"volberg", "infimum of the harmonic-measure functional over a grid"},
      {"sample-constant", "empirical sampling constant, or gamma sweep with fits"},
      {"verify", "randomized property suites (needs a seed)"},
      {"report", "covering, density and volberg together"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config, "scenario JSON")->required();
    sub->add_option("--out", out, "output directory");
    sub->add_option("--seed", seed, "RNG seed (overrides the config)");
    sub->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  const std::string cmd = app.get_subcommands().front()->get_name();
  mspace::ScenarioConfig cfg;
  try {
    cfg = mspace::load_scenario(config);
  } catch (const mspace::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  if (seed) cfg.seed = *seed;
  return mspace::run_command(cmd, cfg, out, jobs);
}
