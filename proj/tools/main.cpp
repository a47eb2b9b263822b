// Command-line driver: one subcommand per experiment plus deterministic
// replay of recorded runs.

#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "invlearn/runner.hpp"
#include "invlearn/version.hpp"

namespace {

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> workers;
};

void add_common(CLI::App* sub, CommonOptions& opts) {
  // Existence is checked by the config parser so a missing file reports as a
  // config error (exit 2) rather than a usage error.
  sub->add_option("--config", opts.config_path, "experiment config file")->required();
  sub->add_option_function<std::uint64_t>(
      "--seed", [&opts](std::uint64_t v) { opts.seed = v; }, "override master_seed");
  sub->add_option_function<std::string>(
      "--out", [&opts](const std::string& v) { opts.out = v; }, "override output_dir");
  sub->add_option_function<int>(
      "--workers", [&opts](int v) { opts.workers = v; }, "worker pool size")
      ->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical laboratory for projection-regularized inverse learning"};
  app.set_version_flag("--version", std::string(invlearn::kVersion));
  app.require_subcommand(1);

  const char* experiments[] = {"simulate",  "rates",    "concentration",
                               "highprob",  "diagnose", "minimax-pack"};
  std::map<std::string, CommonOptions> options;
  for (const char* name : experiments)
    add_common(app.add_subcommand(name, std::string("run the ") + name + " experiment"),
               options[name]);

  std::string manifest_path;
  std::optional<int> replay_workers;
  CLI::App* replay_cmd = app.add_subcommand("replay", "re-execute a recorded run");
  replay_cmd->add_option("manifest", manifest_path, "manifest.json of a prior run")
      ->required();
  replay_cmd
      ->add_option_function<int>(
          "--workers", [&replay_workers](int v) { replay_workers = v; },
          "worker pool size")
      ->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  if (replay_cmd->parsed()) return invlearn::replay(manifest_path, replay_workers);

  for (const char* name : experiments) {
    CLI::App* sub = app.get_subcommand(name);
    if (!sub->parsed()) continue;
    const CommonOptions& opts = options[name];
    try {
      invlearn::RunConfig config = invlearn::parse_config_file(opts.config_path);
      if (config.experiment != name) {
        std::cerr << "config error at config.experiment: config declares '"
                  << config.experiment << "' but subcommand is '" << name << "'\n";
        return invlearn::kExitConfigError;
      }
      invlearn::RunOverrides overrides;
      overrides.master_seed = opts.seed;
      overrides.output_dir = opts.out;
      overrides.workers = opts.workers;
      return invlearn::run(std::move(config), overrides).exit_code;
    } catch (const invlearn::ConfigError& e) {
      std::cerr << e.what() << '\n';
      return invlearn::kExitConfigError;
    } catch (const std::exception& e) {
      std::cerr << "run failed: " << e.what() << '\n';
      return invlearn::kExitGateFailure;
    }
  }
  return invlearn::kExitConfigError;
}
