#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "twocharge/diagnostics.hpp"

namespace twocharge::cli {

constexpr const char* kOutputDirEnv = "TWOCHARGE_OUTPUT_DIR";

enum class IcKind { circular, state };

struct RunConfig {
  double eta = 1.0;
  int sign = -1;
  double alpha = 0.5;
  IcKind ic = IcKind::circular;
  double r0 = 50.0;
  StateVector state;
  int level = 0;
  StopCondition stop;
  LevelTolerances tolerances;
  AccelMode accel_mode = AccelMode::forward_difference;
  CachePolicy cache = CachePolicy::per_evaluation;
  std::filesystem::path output_dir = ".";
  std::size_t stride = 1;
  std::vector<double> etas;
  std::vector<int> levels;
  double compare_t_max = 0.0;
  std::size_t grid = kDefaultDistanceGrid;

  SystemParams params() const;
  StateVector initial_state() const;
  LevelConfig level_config(int n) const;
};

/// Keys accepted in config files and as --key overrides.
const std::vector<std::string>& config_keys();

void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);

/// "key = value" lines; '#' starts a comment.
void load_config_file(RunConfig& cfg, const std::filesystem::path& path);

/// Default config with the output directory taken from the environment.
RunConfig default_config();

/// Checks everything the commands rely on and creates the output directory.
void validate(RunConfig& cfg);

}  // namespace twocharge::cli
