#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace twocharge {

enum class ErrorKind {
  validation,
  singularity,      // coincident charges
  light_cone,       // vanishing 1 -/+ n.v denominator
  superluminal,     // |v| >= 1
  degenerate,       // ill-conditioned acceleration system
  integration_stall,
  flow_too_short,
  no_root,
  convergence,
  domain,
  not_applicable,
  io,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Library exception. `level()` is the index n of the H^(n) field in which
/// the failure arose, or -1 when the error is not tied to a level.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, int level = -1);

  ErrorKind kind() const noexcept { return kind_; }
  int level() const noexcept { return level_; }
  const std::string& message() const noexcept { return message_; }

  /// Copy of this error tagged with `level` (no-op if already tagged).
  Error at_level(int level) const;

 private:
  ErrorKind kind_;
  int level_;
  std::string message_;
};

/// True for failures that signal a bad trial state rather than a broken run;
/// the integrator answers these by shrinking the step.
bool is_recoverable_by_step_control(ErrorKind kind) noexcept;

}  // namespace twocharge
