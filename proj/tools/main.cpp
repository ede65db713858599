#include <iostream>

#include "CLI11.hpp"
#include "experiment.hpp"

namespace {

struct Flags {
  std::string config;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
};

void addRunFlags(CLI::App* sub, Flags& flags) {
  sub->add_option("--config", flags.config, "experiment config (key = value lines)")->required();
  sub->add_option("--out", flags.out, "output directory (overrides run.out and PXO_OUT_DIR)");
  sub->add_option("--seed", flags.seed, "seed for randomized presets (overrides run.seed)");
}

}  // namespace

int main(int argc, char** argv) {
  using namespace pxo::cli;
  CLI::App app{"Obstacle problems for the p(x)-Laplacian: solver and diagnostic pipelines"};
  app.require_subcommand(1);
  Flags flags;

  auto* list = app.add_subcommand("presets", "list the available presets");
  auto* run = app.add_subcommand("run", "run the preset named by run.preset in the config");
  addRunFlags(run, flags);
  std::vector<std::pair<CLI::App*, std::string>> subs;
  for (const PresetInfo& p : presets()) {
    auto* sub = app.add_subcommand(p.name, p.description);
    addRunFlags(sub, flags);
    subs.emplace_back(sub, p.name);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  if (list->parsed()) {
    for (const PresetInfo& p : presets()) std::cout << p.name << "\t" << p.description << "\n";
    return kOk;
  }

  Config config;
  try {
    config = Config::load(flags.config);
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kConfigError;
  }

  std::string preset;
  if (run->parsed()) {
    try {
      preset = config.text("run.preset");
    } catch (const ConfigError& e) {
      std::cerr << e.what() << "\n";
      return kConfigError;
    }
  } else {
    for (const auto& [sub, name] : subs) {
      if (sub->parsed()) preset = name;
    }
  }
  return runFromConfig(preset, config, flags.out, flags.seed, std::cout, std::cerr);
}
