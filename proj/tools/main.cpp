#include <algorithm>
#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "commands.hpp"

using namespace twocharge;
using namespace twocharge::cli;

int main(int argc, char** argv) {
  CLI::App app{"Two-charge relativistic dynamics with iterated delayed fields"};
  app.require_subcommand(1);

  std::string config_path;
  std::map<std::string, std::string> overrides;
  app.add_option("-c,--config", config_path, "key = value configuration file");
  for (const auto& key : config_keys()) {
    std::string flag = key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    app.add_option_function<std::string>(
        "--" + flag, [&overrides, key](const std::string& v) { overrides[key] = v; },
        "override '" + key + "'");
  }
  auto* simulate = app.add_subcommand("simulate", "integrate one level and write trajectory.csv");
  auto* sweep = app.add_subcommand("sweep", "singularity times over a list of eta values");
  auto* compare = app.add_subcommand("compare", "distance metric between consecutive levels");
  for (auto* sub : {simulate, sweep, compare}) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig cfg = default_config();
    if (!config_path.empty()) load_config_file(cfg, config_path);
    for (const auto& [k, v] : overrides) apply_setting(cfg, k, v);
    validate(cfg);
    if (simulate->parsed()) return cmd_simulate(cfg, std::cout);
    if (sweep->parsed()) return cmd_sweep(cfg, std::cout);
    return cmd_compare(cfg, std::cout);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ExitCode::numerical_failure;
  }
}
