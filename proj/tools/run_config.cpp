#include "run_config.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "twocharge/diagnostics.hpp"

namespace twocharge::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad(const std::string& key, const std::string& value, const std::string& why) {
  throw Error(ErrorKind::validation, key + " = '" + value + "': " + why);
}

double to_double(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (v == "inf" || v == "infinity") return INFINITY;
  if (v == "-inf" || v == "-infinity") return -INFINITY;
  char* end = nullptr;
  errno = 0;
  const double d = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE) bad(key, value, "not a number");
  return d;
}

long to_long(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  char* end = nullptr;
  errno = 0;
  const long n = std::strtol(v.c_str(), &end, 10);
  if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE) bad(key, value, "not an integer");
  return n;
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

SystemParams RunConfig::params() const { return make_params(eta, sign, alpha); }

StateVector RunConfig::initial_state() const {
  if (ic == IcKind::circular) return circular_initial_condition(params(), r0);
  validate_state(state);
  return state;
}

LevelConfig RunConfig::level_config(int n) const {
  LevelConfig c;
  c.level = n;
  c.tolerances = tolerances;
  c.accel_mode = accel_mode;
  c.cache = cache;
  return c;
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "eta",       "sign",          "alpha",     "ic",        "r0",          "state",
      "level",     "v_threshold",   "min_separation", "t_limit", "abs_tol",   "rel_tol",
      "delay_tol", "dtau_factor",   "accel_mode", "cache",    "output_dir",  "stride",
      "etas",      "levels",        "t_max",     "grid"};
  return keys;
}

void apply_setting(RunConfig& cfg, const std::string& raw_key, const std::string& value) {
  std::string key = trim(raw_key);
  std::replace(key.begin(), key.end(), '-', '_');
  if (key == "eta") cfg.eta = to_double(key, value);
  else if (key == "sign") cfg.sign = static_cast<int>(to_long(key, value));
  else if (key == "alpha") cfg.alpha = to_double(key, value);
  else if (key == "ic") {
    const std::string v = trim(value);
    if (v == "circular") cfg.ic = IcKind::circular;
    else if (v == "state") cfg.ic = IcKind::state;
    else bad(key, value, "expected circular or state");
  } else if (key == "r0") cfg.r0 = to_double(key, value);
  else if (key == "state") {
    const auto items = split_list(value);
    if (items.size() != 12) bad(key, value, "expected 12 comma-separated numbers");
    Vec12 x;
    for (int i = 0; i < 12; ++i) x[i] = to_double(key, items[static_cast<std::size_t>(i)]);
    cfg.state = StateVector::unpack(x);
    cfg.ic = IcKind::state;
  } else if (key == "level") {
    const long n = to_long(key, value);
    if (n < 0 || n > 16) bad(key, value, "level must lie in [0, 16]");
    cfg.level = static_cast<int>(n);
  } else if (key == "v_threshold") cfg.stop.v_threshold = to_double(key, value);
  else if (key == "min_separation") cfg.stop.min_separation = to_double(key, value);
  else if (key == "t_limit") cfg.stop.t_limit = to_double(key, value);
  else if (key == "abs_tol") cfg.tolerances.integration.abs = to_double(key, value);
  else if (key == "rel_tol") cfg.tolerances.integration.rel = to_double(key, value);
  else if (key == "delay_tol") cfg.tolerances.delay_tol = to_double(key, value);
  else if (key == "dtau_factor") cfg.tolerances.dtau_factor = to_double(key, value);
  else if (key == "accel_mode") {
    const std::string v = trim(value);
    if (v == "forward_difference") cfg.accel_mode = AccelMode::forward_difference;
    else if (v == "exact") cfg.accel_mode = AccelMode::exact;
    else bad(key, value, "expected forward_difference or exact");
  } else if (key == "cache") {
    const std::string v = trim(value);
    if (v == "per_evaluation") cfg.cache = CachePolicy::per_evaluation;
    else if (v == "none") cfg.cache = CachePolicy::none;
    else bad(key, value, "expected per_evaluation or none");
  } else if (key == "output_dir") cfg.output_dir = trim(value);
  else if (key == "stride") {
    const long n = to_long(key, value);
    if (n < 1) bad(key, value, "stride must be positive");
    cfg.stride = static_cast<std::size_t>(n);
  } else if (key == "etas") {
    cfg.etas.clear();
    for (const auto& item : split_list(value)) cfg.etas.push_back(to_double(key, item));
  } else if (key == "levels") {
    cfg.levels.clear();
    for (const auto& item : split_list(value)) {
      const long n = to_long(key, item);
      if (n < 0 || n > 16) bad(key, value, "levels must lie in [0, 16]");
      cfg.levels.push_back(static_cast<int>(n));
    }
  } else if (key == "t_max") cfg.compare_t_max = to_double(key, value);
  else if (key == "grid") {
    const long n = to_long(key, value);
    if (n < 2) bad(key, value, "grid needs at least two points");
    cfg.grid = static_cast<std::size_t>(n);
  } else {
    throw Error(ErrorKind::validation, "unknown setting '" + key + "'");
  }
}

void load_config_file(RunConfig& cfg, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::io, "cannot read config file " + path.string());
  }
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::validation,
                  path.string() + ":" + std::to_string(lineno) + ": expected key = value");
    }
    apply_setting(cfg, line.substr(0, eq), line.substr(eq + 1));
  }
}

RunConfig default_config() {
  RunConfig cfg;
  if (const char* dir = std::getenv(kOutputDirEnv); dir != nullptr && *dir != '\0') {
    cfg.output_dir = dir;
  }
  return cfg;
}

void validate(RunConfig& cfg) {
  const SystemParams p = cfg.params();
  twocharge::validate(cfg.stop);
  twocharge::validate(cfg.level_config(cfg.level));
  if (cfg.ic == IcKind::circular && !(cfg.r0 > 0.0)) {
    throw Error(ErrorKind::validation, "r0 must be positive");
  }
  (void)cfg.initial_state();
  for (double eta : cfg.etas) (void)make_params(eta, p.sign, p.alpha);
  if (!(cfg.compare_t_max >= 0.0)) {
    throw Error(ErrorKind::validation, "t_max must be non-negative");
  }
  std::error_code ec;
  std::filesystem::create_directories(cfg.output_dir, ec);
  if (ec || !std::filesystem::is_directory(cfg.output_dir)) {
    throw Error(ErrorKind::io, "cannot create output directory " + cfg.output_dir.string());
  }
  const auto probe = cfg.output_dir / ".twocharge_write_test";
  {
    std::ofstream out(probe);
    if (!out) throw Error(ErrorKind::io, "output directory is not writable: " + cfg.output_dir.string());
  }
  std::filesystem::remove(probe, ec);
}

}  // namespace twocharge::cli
