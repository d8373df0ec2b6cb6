#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace twocharge::cli {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double max_speed(const Vec12& x) {
  return std::max(x.segment<3>(3).norm(), x.segment<3>(9).norm());
}

double separation(const Vec12& x) { return (x.segment<3>(0) - x.segment<3>(6)).norm(); }

std::string termination_label(const LevelRun& r) {
  return r.stall ? "step_underflow" : std::string(to_string(r.run.termination));
}

}  // namespace

int exit_code_for(const Error& e) noexcept {
  switch (e.kind()) {
    case ErrorKind::validation:
    case ErrorKind::io:
      return ExitCode::validation_failure;
    default:
      return ExitCode::numerical_failure;
  }
}

LevelRun run_level(const RunConfig& cfg, int n, double eta) {
  RunConfig c = cfg;
  c.eta = eta;
  const SystemParams p = c.params();
  const StateVector x0 = c.initial_state();
  try {
    return LevelRun{trajectory(n, x0, p, c.level_config(n), c.stop), std::nullopt};
  } catch (const IntegrationStall& e) {
    const auto& partial = e.partial();
    if (partial.knots().size() < 2) throw;
    Trajectory t{p, n, partial, Termination::step_underflow, partial.t_end()};
    return LevelRun{std::move(t), std::string(e.what())};
  }
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::io, "cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw Error(ErrorKind::io, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorKind::io, "cannot move " + tmp.string() + " to " + path.string());
}

void write_trajectory_csv(const std::filesystem::path& path, const TrajectorySegment& segment,
                          std::size_t stride) {
  std::ostringstream out;
  out << "t,x1,y1,z1,x2,y2,z2,vx1,vy1,vz1,vx2,vy2,vz2,ax1,ay1,az1,ax2,ay2,az2,r,smax\n";
  const auto& knots = segment.knots();
  auto row = [&](const Knot& k) {
    const Vec12& x = k.x;
    const Vec12& d = k.dx;
    const double cols[] = {k.t,    x[0],  x[1],  x[2],  x[6], x[7], x[8],
                           x[3],   x[4],  x[5],  x[9],  x[10], x[11],
                           d[3],   d[4],  d[5],  d[9],  d[10], d[11],
                           separation(x), max_speed(x)};
    bool first = true;
    for (double c : cols) {
      if (!first) out << ',';
      out << num(c);
      first = false;
    }
    out << '\n';
  };
  for (std::size_t i = 0; i < knots.size(); i += stride) row(knots[i]);
  if ((knots.size() - 1) % stride != 0) row(knots.back());
  write_atomic(path, out.str());
}

int cmd_simulate(const RunConfig& cfg, std::ostream& log) {
  const LevelRun r = run_level(cfg, cfg.level, cfg.eta);
  const auto& seg = r.run.segment;
  write_trajectory_csv(cfg.output_dir / "trajectory.csv", seg, cfg.stride);

  const Knot& last = seg.knots().back();
  const StateVector xf = StateVector::unpack(last.x);
  std::ostringstream s;
  s << "command = simulate\n";
  s << "level = " << cfg.level << "\n";
  s << "eta = " << num(cfg.eta) << "\n";
  s << "sign = " << cfg.sign << "\n";
  s << "alpha = " << num(cfg.alpha) << "\n";
  s << "termination = " << termination_label(r) << "\n";
  if (r.run.termination == Termination::speed_threshold) {
    s << "t_n = " << num(r.run.termination_time) << "\n";
  }
  s << "t_end = " << num(last.t) << "\n";
  s << "knots = " << seg.knots().size() << "\n";
  s << "separation = " << num(separation(last.x)) << "\n";
  s << "max_speed = " << num(max_speed(last.x)) << "\n";
  auto vec = [&](const char* name, const Vec3& v) {
    s << name << " = " << num(v.x()) << "," << num(v.y()) << "," << num(v.z()) << "\n";
  };
  vec("r1", xf.r1);
  vec("v1", xf.v1);
  vec("r2", xf.r2);
  vec("v2", xf.v2);
  if (r.stall) s << "error = " << *r.stall << "\n";
  write_atomic(cfg.output_dir / "summary.txt", s.str());

  log << "level " << cfg.level << ": " << termination_label(r) << " at t = " << num(last.t)
      << "\n";
  if (r.stall) {
    log << "error: " << *r.stall << "\n";
    return ExitCode::numerical_failure;
  }
  return ExitCode::ok;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& log) {
  const auto path = cfg.output_dir / "sweep.csv";
  const std::string header = "eta,level,status,termination,t_n,t_end,max_speed,error\n";
  std::string table = header;
  std::vector<double> xs, ys;
  bool failed = false;
  write_atomic(path, table);
  for (double eta : cfg.etas) {
    std::ostringstream row;
    row << num(eta) << "," << cfg.level << ",";
    try {
      const LevelRun r = run_level(cfg, cfg.level, eta);
      const Knot& last = r.run.segment.knots().back();
      const bool hit = r.run.termination == Termination::speed_threshold;
      row << (hit ? "ok" : "no_threshold") << "," << termination_label(r) << ","
          << (hit ? num(r.run.termination_time) : "") << "," << num(last.t) << ","
          << num(max_speed(last.x)) << ",";
      if (r.stall) {
        std::string msg = *r.stall;
        std::replace(msg.begin(), msg.end(), ',', ';');
        row << msg;
      }
      if (hit) {
        xs.push_back(eta);
        ys.push_back(r.run.termination_time);
      }
      log << "eta " << num(eta) << ": " << termination_label(r) << " at t = " << num(last.t)
          << "\n";
    } catch (const Error& e) {
      failed = true;
      std::string msg = e.what();
      std::replace(msg.begin(), msg.end(), ',', ';');
      row << "error,,,,," << msg;
      log << "eta " << num(eta) << ": " << e.what() << "\n";
    }
    table += row.str() + "\n";
    write_atomic(path, table);
  }
  if (xs.size() >= 2) {
    const LinearFit fit = linear_fit(xs, ys);
    table += "# fit slope=" + num(fit.slope) + " intercept=" + num(fit.intercept) +
             " r2=" + num(fit.r_squared) + " points=" + std::to_string(xs.size()) + "\n";
    write_atomic(path, table);
    log << "linear fit: slope " << num(fit.slope) << ", intercept " << num(fit.intercept)
        << ", r2 " << num(fit.r_squared) << "\n";
  }
  return failed ? ExitCode::numerical_failure : ExitCode::ok;
}

int cmd_compare(const RunConfig& cfg, std::ostream& log) {
  if (cfg.levels.size() < 2) {
    throw Error(ErrorKind::validation, "compare needs at least two levels");
  }
  std::vector<LevelRun> runs;
  for (int n : cfg.levels) {
    runs.push_back(run_level(cfg, n, cfg.eta));
    const auto& seg = runs.back().run.segment;
    log << "level " << n << ": " << termination_label(runs.back()) << " at t = "
        << num(seg.t_end()) << "\n";
    if (runs.back().stall) log << "  partial run used: " << *runs.back().stall << "\n";
  }
  double t_max = cfg.compare_t_max;
  if (!(t_max > 0.0)) {
    t_max = runs.front().run.segment.span();
    for (const auto& r : runs) t_max = std::min(t_max, r.run.segment.span());
  }
  std::string table = "n_from,n_to,t_max,D_r1,D_r2\n";
  for (std::size_t i = 0; i + 1 < runs.size(); ++i) {
    const DistanceReport d = trajectory_distance(runs[i].run, runs[i + 1].run, t_max, cfg.grid);
    table += std::to_string(d.n_from) + "," + std::to_string(d.n_to) + "," + num(d.t_max) + "," +
             num(d.d_r1) + "," + num(d.d_r2) + "\n";
  }
  write_atomic(cfg.output_dir / "compare.csv", table);
  log << table;
  return ExitCode::ok;
}

}  // namespace twocharge::cli
