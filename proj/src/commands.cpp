#include "routh/commands.hpp"

#include "routh/ellipsoid.hpp"
#include "routh/errors.hpp"
#include "routh/reduction.hpp"
#include "routh/rigidbody.hpp"
#include "routh/trajectory_io.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

namespace routh {

namespace {

using nlohmann::json;

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

void write_json(const std::string& path, const json& j) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::trunc);
    if (!f) throw Error(ErrorKind::Config, "cannot open " + tmp + " for writing");
    f << j.dump(2) << '\n';
  }
  std::filesystem::rename(tmp, path);
}

Trajectory wrapped(Trajectory traj, int first_psi, int l) {
  for (Vec& s : traj.states) {
    for (int j = 0; j < l; ++j) s[first_psi + j] = wrap_angle(s[first_psi + j]);
  }
  return traj;
}

FullState initial_full(const SymmetricSystem& sys, const RunConfig& cfg) {
  return complete_state(sys, cfg.momentum, initial_reduced(sys, cfg), cfg.x, cfg.psi);
}

struct Check {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::optional<Error> error;
};

class CheckList {
 public:
  template <typename F>
  void run(const std::string& name, double tol, F&& measure) {
    Check c{name, 0.0, tol, false, std::nullopt};
    try {
      c.value = measure();
      c.passed = std::isfinite(c.value) && c.value <= tol;
    } catch (const Error& e) {
      c.error = e;
    }
    checks_.push_back(std::move(c));
  }

  const std::vector<Check>& checks() const { return checks_; }

 private:
  std::vector<Check> checks_;
};

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

RunConfig resolve_config(const CommandOptions& opt) {
  RunConfig cfg = load_config(opt.config_path);
  if (opt.output) cfg.output = *opt.output;
  if (opt.dt) {
    if (!(*opt.dt > 0)) throw Error(ErrorKind::Config, "--dt must be > 0");
    cfg.integrator.dt = *opt.dt;
  }
  if (opt.t_end) {
    if (!(*opt.t_end > 0)) throw Error(ErrorKind::Config, "--t-end must be > 0");
    cfg.t_end = *opt.t_end;
  }
  return cfg;
}

int cmd_simulate_reduced(const CommandOptions& opt, std::ostream& out) {
  const RunConfig cfg = resolve_config(opt);
  const SymmetricSystem sys = make_system(cfg);
  const ReducedState r0 = initial_reduced(sys, cfg);
  const Trajectory traj = integrate_reduced(sys, cfg.momentum, r0, 0.0, cfg.t_end, cfg.integrator);
  double drift = 0.0;
  for (const Vec& s : traj.states) {
    drift = std::max(drift, std::abs(reduced_energy(sys, cfg.momentum,
                                                    ReducedState::from_vector(sys.n, s)) -
                                     traj.meta.energy0));
  }
  write_trajectory(cfg.output, traj, reduced_columns(cfg));
  out << "samples: " << traj.size() << '\n';
  out << "energy: " << sci(traj.meta.energy0) << '\n';
  out << "energy drift: " << sci(drift) << " (relative "
      << sci(drift / std::max(std::abs(traj.meta.energy0), 1e-300)) << ")\n";
  out << "wrote " << cfg.output << '\n';
  return 0;
}

int cmd_simulate_full(const CommandOptions& opt, std::ostream& out) {
  const RunConfig cfg = resolve_config(opt);
  const SymmetricSystem sys = make_system(cfg);
  const Trajectory traj = integrate_full(sys, initial_full(sys, cfg), 0.0, cfg.t_end, cfg.integrator);
  const Vec j0 = traj.meta.momentum->stacked();
  double drift = 0.0;
  for (const Vec& s : traj.states) {
    const Vec j = momentum_map(sys, FullState::from_vector(sys, s)).stacked();
    if (j.size() > 0) drift = std::max(drift, (j - j0).cwiseAbs().maxCoeff());
  }
  write_trajectory(cfg.output, wrapped(traj, sys.n + sys.k, sys.l), full_columns(cfg));
  out << "samples: " << traj.size() << '\n';
  out << "momentum drift: " << sci(drift) << '\n';
  out << "wrote " << cfg.output << '\n';
  return 0;
}

int cmd_reconstruct(const CommandOptions& opt, std::ostream& out) {
  const RunConfig cfg = resolve_config(opt);
  if (!opt.reduced) throw Error(ErrorKind::Config, "reconstruct needs --reduced FILE");
  const SymmetricSystem sys = make_system(cfg);
  const TrajectoryFile red = read_trajectory(*opt.reduced);
  const Trajectory full = reconstruct(sys, cfg.momentum, red.traj, cfg.x, cfg.psi);
  write_trajectory(cfg.output, wrapped(full, sys.n + sys.k, sys.l), full_columns(cfg));
  out << "samples: " << full.size() << '\n';
  out << "wrote " << cfg.output << '\n';
  return 0;
}

int cmd_verify(const CommandOptions& opt, std::ostream& out) {
  const RunConfig cfg = resolve_config(opt);
  const SymmetricSystem sys = make_system(cfg);
  const MomentumValue& f = cfg.momentum;
  const MomentumValue zero = MomentumValue::zero(sys);
  const int n = sys.n;

  // Sample states near the configured one, inside the chart.
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<ReducedState> states;
  for (int i = 0; i < 20; ++i) {
    ReducedState r{cfg.q, cfg.qdot};
    if (i > 0) {
      for (int j = 0; j < n; ++j) {
        r.q[j] += 0.1 * unit(rng);
        r.qdot[j] += unit(rng);
      }
    }
    states.push_back(r);
  }

  CheckList list;
  list.run("momentum round-trip", 1e-12, [&] {
    double worst = 0.0;
    for (const auto& r : states) {
      const FullState s = complete_state(sys, f, r, cfg.x, cfg.psi);
      const Vec back = momentum_map(sys, s).stacked();
      const Vec want = f.stacked();
      if (want.size() > 0) {
        worst = std::max(worst, (back - want).norm() / std::max(1.0, want.norm()));
      }
    }
    return worst;
  });
  list.run("momentum linearity", 1e-12, [&] {
    double worst = 0.0;
    for (const auto& r : states) {
      FullState s = complete_state(sys, f, r, cfg.x, cfg.psi);
      const Vec j1 = momentum_map(sys, s).stacked();
      s.qdot *= 2.5;
      s.xdot *= 2.5;
      s.psidot *= 2.5;
      const Vec j2 = momentum_map(sys, s).stacked();
      if (j1.size() > 0) {
        worst = std::max(worst, (j2 - 2.5 * j1).norm() / std::max(1.0, 2.5 * j1.norm()));
      }
    }
    return worst;
  });
  list.run("zero-momentum routhian equals lagrangian", 1e-12, [&] {
    double worst = 0.0;
    for (const auto& r : states) {
      const double lr = routhian(sys, zero, r);
      const double lf = lagrangian_full(sys, complete_state(sys, zero, r, cfg.x, cfg.psi));
      worst = std::max(worst, rel(lr, lf));
    }
    return worst;
  });
  list.run("determinant identity", 1e-5, [&] {
    double worst = 0.0;
    for (const auto& r : states) {
      const auto [lhs, rhs] = symplectic_det_pair(sys, f, r);
      worst = std::max(worst, std::abs(lhs - rhs) / std::abs(rhs));
    }
    return worst;
  });
  list.run("reduced mass is the velocity hessian", 1e-6, [&] {
    double worst = 0.0;
    for (const auto& r : states) {
      const Mat m = reduced_mass_matrix(sys, r.q);
      if (m.llt().info() != Eigen::Success) return std::numeric_limits<double>::infinity();
      for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
          const double h = 1e-3;
          auto L = [&](double da, double db) {
            ReducedState p = r;
            p.qdot[a] += da;
            p.qdot[b] += db;
            return routhian(sys, f, p);
          };
          const double fd = (L(h, h) - L(h, -h) - L(-h, h) + L(-h, -h)) / (4 * h * h);
          worst = std::max(worst, std::abs(fd - m(a, b)) / std::max(1.0, m.norm()));
        }
      }
    }
    return worst;
  });
  list.run("second-order field", 0.0, [&] {
    double worst = 0.0;
    for (const auto& r : states) {
      worst = std::max(worst, (reduced_rhs(sys, f, r).qdot - r.qdot).cwiseAbs().maxCoeff());
    }
    return worst;
  });
  if (cfg.system == SystemKind::RigidBody) {
    const auto p = rigid_body_params(cfg);
    list.run("closed-form zero-momentum routhian", 1e-10, [&] {
      double worst = 0.0;
      for (const auto& r : states) {
        const double a = rigidbody::kolosov_reduced_lagrangian(p, r.q[0], r.q[1], r.qdot[0], r.qdot[1]);
        worst = std::max(worst, rel(a, routhian(sys, zero, r)));
      }
      return worst;
    });
  }

  const double span = std::min(cfg.t_end, 10.0);
  std::optional<Trajectory> full, red;
  list.run("projected full flow matches reduced flow", 1e-6, [&] {
    const FullState s0 = initial_full(sys, cfg);
    full = integrate_full(sys, s0, 0.0, span, cfg.integrator);
    red = integrate_reduced(sys, f, initial_reduced(sys, cfg), 0.0, span, cfg.integrator);
    if (full->size() != red->size()) return std::numeric_limits<double>::infinity();
    double worst = 0.0;
    const int d = sys.dim();
    for (std::size_t i = 0; i < red->size(); ++i) {
      const Vec& a = full->states[i];
      const Vec& b = red->states[i];
      worst = std::max({worst, (a.head(n) - b.head(n)).cwiseAbs().maxCoeff(),
                        (a.segment(d, n) - b.tail(n)).cwiseAbs().maxCoeff()});
    }
    return worst;
  });
  list.run("reconstructed cyclic coordinates match full flow", 1e-6, [&] {
    if (!full || !red) throw Error(ErrorKind::GridMismatch, "flows unavailable");
    const Trajectory rec = reconstruct(sys, f, *red, cfg.x, cfg.psi);
    double worst = 0.0;
    const int c = sys.cyclic_dim();
    for (std::size_t i = 0; i < rec.size(); ++i) {
      if (c > 0) {
        worst = std::max(worst, (rec.states[i].segment(n, c) - full->states[i].segment(n, c))
                                    .cwiseAbs()
                                    .maxCoeff());
      }
    }
    return worst;
  });
  list.run("reduced energy drift (relative)", 1e-6, [&] {
    if (!red) throw Error(ErrorKind::GridMismatch, "flow unavailable");
    double worst = 0.0;
    const double e0 = red->meta.energy0;
    for (const Vec& s : red->states) {
      worst = std::max(worst, std::abs(reduced_energy(sys, f, ReducedState::from_vector(n, s)) - e0));
    }
    return worst / std::max(std::abs(e0), 1e-300);
  });

  json report;
  report["system"] = sys.id;
  report["chart"] = sys.chart;
  report["checks"] = json::array();
  bool all = true;
  std::optional<ErrorKind> first_error;
  for (const Check& c : list.checks()) {
    json j{{"name", c.name}, {"passed", c.passed}, {"tolerance", c.tolerance}};
    if (c.error) {
      j["value"] = nullptr;
      j["error"] = c.error->what();
      if (!first_error) first_error = c.error->kind();
      out << "FAIL " << c.name << ": " << c.error->what() << '\n';
    } else {
      j["value"] = std::isfinite(c.value) ? json(c.value) : json(nullptr);
      out << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << sci(c.value)
          << " (tol " << sci(c.tolerance) << ")\n";
    }
    all = all && c.passed;
    report["checks"].push_back(j);
  }
  report["passed"] = all;
  if (opt.report) write_json(*opt.report, report);
  if (all) return 0;
  return first_error ? exit_code(*first_error) : 4;
}

int cmd_kolosov(const CommandOptions& opt, std::ostream& out) {
  const RunConfig cfg = resolve_config(opt);
  const auto p = rigid_body_params(cfg);
  const SymmetricSystem sys = make_system(cfg);
  if (!cfg.momentum.stacked().isZero(0.0)) {
    throw Error(ErrorKind::Config, "kolosov needs zero axial momentum");
  }
  const ReducedState r0 = initial_reduced(sys, cfg);
  const double h = reduced_energy(sys, cfg.momentum, r0);
  const double vmax = ellipsoid::max_potential(p);
  if (!(h > vmax)) {
    throw Error(ErrorKind::InvalidParams,
                "the energy constant must satisfy h > max V0 (h = " + sci(h) + ", max V0 = " +
                    sci(vmax) + ")");
  }

  const auto eq = ellipsoid::kolosov_equivalence(p, r0, cfg.t_end, cfg.integrator);
  const bool free_body = p.potential_name == "none";
  out << "h: " << sci(h) << '\n';
  out << "zero-energy relation: " << sci(eq.energy_relation) << '\n';
  out << "sup distance to conformal flow: " << sci(eq.sup_distance) << '\n';
  if (free_body) out << "dSigma-speed variation: " << sci(eq.speed_variation) << '\n';

  json report;
  report["h"] = h;
  report["equivalence"] = {{"energy_relation", eq.energy_relation},
                           {"sup_distance", eq.sup_distance},
                           {"speed_variation", free_body ? json(eq.speed_variation) : json(nullptr)}};
  report["sections"] = json::array();

  const ellipsoid::ConformalData cd = ellipsoid::make_conformal_data(p, h);
  const char* names[] = {"x=0", "y=0", "z=0"};
  const ellipsoid::Section planes[] = {ellipsoid::Section::X, ellipsoid::Section::Y,
                                       ellipsoid::Section::Z};
  int code = 0;
  for (int i = 0; i < 3; ++i) {
    json js{{"plane", names[i]}};
    try {
      const auto so = ellipsoid::section_orbit(p, cd, planes[i]);
      const auto sr = ellipsoid::section_reduced_orbit(p, cd, so);
      const auto rel_orbit = rigidbody::relative_orbit(sr.params, sr.r0, sr.period);
      js["period_tau"] = so.orbit.period;
      js["closure_error"] = so.orbit.closure_error;
      js["sigma_length"] = so.sigma_length;
      js["max_off_plane"] = so.max_off_plane;
      js["period_t"] = rel_orbit.reduced.period;
      js["lambda"] = rel_orbit.Lambda;
      js["endpoint_gap"] = rel_orbit.endpoint_gap;
      js["rotating_frame_residual"] = rel_orbit.residual;
      char line[256];
      std::snprintf(line, sizeof line,
                    "section %s: period_tau=%.12g closure=%.3e sigma_length=%.12g period_t=%.12g "
                    "lambda=%.3e residual=%.3e\n",
                    names[i], so.orbit.period, so.orbit.closure_error, so.sigma_length,
                    rel_orbit.reduced.period, rel_orbit.Lambda, rel_orbit.residual);
      out << line;
    } catch (const Error& e) {
      // A section that is not flow-invariant for this potential is skipped.
      const bool skipped = e.kind() == ErrorKind::InvalidParams;
      js[skipped ? "skipped" : "error"] = e.what();
      out << "section " << names[i] << (skipped ? " skipped: " : ": ") << e.what() << '\n';
      if (!skipped && code == 0) code = exit_code(e.kind());
    }
    report["sections"].push_back(js);
  }

  write_trajectory(cfg.output, eq.image, {"x", "y", "z", "xp", "yp", "zp"});
  out << "wrote " << cfg.output << '\n';
  if (opt.report) write_json(*opt.report, report);
  return code;
}

}  // namespace routh
