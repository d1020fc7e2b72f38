#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "greedylab/experiment.hpp"

using namespace greedylab;

namespace {

/// Flags are collected as text and applied over the config file, so that a
/// flag always wins.
void add_flags(CLI::App* cmd, std::map<std::string, std::string>& values, bool with_suite,
               bool with_vector, std::optional<std::string>& config) {
  auto add = [&](const std::string& key, const std::string& help) {
    cmd->add_option("--" + key, values[key], help);
  };
  add("space", "space spec, e.g. lp:p=2:dim=8");
  add("dim", "override the spec's dimension");
  add("max-m", "largest m (default: dim)");
  add("samples", "sample budget");
  add("seed", "64-bit seed");
  add("delta-grid", "comma-separated gadget deltas");
  add("out", "output directory");
  if (with_suite) add("suite", "all or a comma list of suites");
  if (with_vector) add("vector", "file with the coefficients of x");
  cmd->add_option("--config", config, "key = value config file");
}

ExperimentConfig build_config(CLI::App* cmd, const std::map<std::string, std::string>& values,
                              const std::optional<std::string>& config_file) {
  ExperimentConfig config;
  if (config_file) {
    for (const auto& [k, v] : read_config_file(*config_file)) apply_setting(config, k, v);
  }
  for (const auto& [key, value] : values) {
    if (cmd->count("--" + key) > 0) apply_setting(config, key, value);
  }
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Greedy-type m-term approximation toolkit"};
  app.require_subcommand(1);

  auto* spaces = app.add_subcommand("spaces", "built-in spaces");
  auto* spaces_list = spaces->add_subcommand("list", "list built-in spaces");
  std::size_t list_dim = 8;
  spaces_list->add_option("--dim", list_dim, "dimension");
  spaces->require_subcommand(1);

  std::map<std::string, std::string> constants_values, curve_values, verify_values;
  std::optional<std::string> constants_cfg, curve_cfg, verify_cfg;
  auto* constants = app.add_subcommand("constants", "write constants.csv and democracy.csv");
  add_flags(constants, constants_values, false, false, constants_cfg);
  auto* curve = app.add_subcommand("curve", "write curve.csv");
  add_flags(curve, curve_values, false, true, curve_cfg);
  auto* verify = app.add_subcommand("verify", "write report.json");
  add_flags(verify, verify_values, true, false, verify_cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  if (spaces_list->parsed()) {
    return guarded([&] {
      if (list_dim == 0) throw ConfigError("invalid value for dim: '0' (need dim >= 1)");
      std::cout << spaces_listing(list_dim);
      return kExitOk;
    });
  }
  if (constants->parsed()) {
    return guarded(
        [&] { return run_constants(build_config(constants, constants_values, constants_cfg)); });
  }
  if (curve->parsed()) {
    return guarded([&] { return run_curve(build_config(curve, curve_values, curve_cfg)); });
  }
  return guarded([&] { return run_verify(build_config(verify, verify_values, verify_cfg)); });
}
