#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "run_config.hpp"
#include "twocharge/diagnostics.hpp"

namespace twocharge::cli {

enum ExitCode : int { ok = 0, validation_failure = 1, numerical_failure = 2 };

/// Exit status for an error raised by the library or the config layer.
int exit_code_for(const Error& e) noexcept;

/// Trajectory of one level. `stall` is set when the run ended early on a
/// step underflow; `run` then holds the partial solution.
struct LevelRun {
  Trajectory run;
  std::optional<std::string> stall;
};

LevelRun run_level(const RunConfig& cfg, int n, double eta);

void write_trajectory_csv(const std::filesystem::path& path, const TrajectorySegment& segment,
                          std::size_t stride);

/// Writes `content` to `path` through a temporary file and a rename.
void write_atomic(const std::filesystem::path& path, const std::string& content);

int cmd_simulate(const RunConfig& cfg, std::ostream& log);
int cmd_sweep(const RunConfig& cfg, std::ostream& log);
int cmd_compare(const RunConfig& cfg, std::ostream& log);

}  // namespace twocharge::cli
