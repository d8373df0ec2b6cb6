#include "twocharge/error.hpp"

namespace twocharge {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::validation: return "validation";
    case ErrorKind::singularity: return "singularity";
    case ErrorKind::light_cone: return "light_cone";
    case ErrorKind::superluminal: return "superluminal";
    case ErrorKind::degenerate: return "degenerate";
    case ErrorKind::integration_stall: return "integration_stall";
    case ErrorKind::flow_too_short: return "flow_too_short";
    case ErrorKind::no_root: return "no_root";
    case ErrorKind::convergence: return "convergence";
    case ErrorKind::domain: return "domain";
    case ErrorKind::not_applicable: return "not_applicable";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

namespace {

std::string format_what(ErrorKind kind, const std::string& message, int level) {
  std::string out(to_string(kind));
  if (level >= 0) {
    out += " [level " + std::to_string(level) + "]";
  }
  out += ": ";
  out += message;
  return out;
}

}  // namespace

Error::Error(ErrorKind kind, const std::string& message, int level)
    : std::runtime_error(format_what(kind, message, level)),
      kind_(kind),
      level_(level),
      message_(message) {}

Error Error::at_level(int level) const {
  if (level_ >= 0) {
    return *this;
  }
  return Error(kind_, message_, level);
}

bool is_recoverable_by_step_control(ErrorKind kind) noexcept {
  return kind == ErrorKind::singularity || kind == ErrorKind::light_cone ||
         kind == ErrorKind::superluminal || kind == ErrorKind::degenerate;
}

}  // namespace twocharge
