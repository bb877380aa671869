#include "routh/rigidbody.hpp"

#include "routh/errors.hpp"
#include "routh/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace routh::rigidbody {

namespace {

void check_pole(double theta) {
  if (!std::isfinite(theta) || pole_distance(theta) < kChartBoundaryTol) {
    throw Error(ErrorKind::ChartBoundary, "theta within 1e-6 of a pole");
  }
}

double angle_gap(double a) { return std::abs(std::remainder(a, 2 * std::numbers::pi)); }

}  // namespace

void RigidBodyParams::validate() const {
  if (!(A > 0) || !(B > 0) || !(C > 0) || !std::isfinite(A + B + C)) {
    throw Error(ErrorKind::InvalidParams, "principal moments must be positive");
  }
  const double slack = 1e-12 * (A + B + C);
  if (A + B < C - slack || B + C < A - slack || C + A < B - slack) {
    throw Error(ErrorKind::InvalidParams, "principal moments violate the triangle inequality");
  }
  if (!potential) throw Error(ErrorKind::InvalidParams, "potential is not set");
}

AnglePotential free_potential() {
  return [](double, double) { return 0.0; };
}

AnglePotential heavy_potential(double coefficient) {
  return [coefficient](double, double theta) { return coefficient * std::cos(theta); };
}

double pole_distance(double theta) { return std::min(theta, std::numbers::pi - theta); }

Mat euler_mass_matrix(const RigidBodyParams& p, double phi, double theta) {
  const double sp = std::sin(phi), cp = std::cos(phi);
  const double st = std::sin(theta), ct = std::cos(theta);
  // rows: d(w1, w2, w3) / d(phidot, thetadot, psidot)
  Eigen::Matrix3d jac;
  jac << 0, cp, st * sp,
         0, -sp, st * cp,
         1, 0, ct;
  const Eigen::Vector3d inertia(p.A, p.B, p.C);
  Mat k = jac.transpose() * inertia.asDiagonal() * jac;
  // exact symmetry for the downstream checks
  return 0.5 * (k + k.transpose());
}

SymmetricSystem rb_system(const RigidBodyParams& p) {
  p.validate();
  SymmetricSystem sys;
  sys.n = 2;
  sys.k = 0;
  sys.l = 1;
  sys.mass_matrix = [p](const Vec& q) { return euler_mass_matrix(p, q[0], q[1]); };
  sys.potential = [pot = p.potential](const Vec& q) { return pot(q[0], q[1]); };
  sys.pole_guard = [](const Vec& q) { return pole_distance(q[1]); };
  sys.id = "rigid-body";
  sys.chart = "euler(phi,theta;psi)";
  return sys;
}

double precession_inertia(const RigidBodyParams& p, double phi, double theta) {
  const double sp = std::sin(phi), cp = std::cos(phi);
  const double st = std::sin(theta), ct = std::cos(theta);
  return (p.A * sp * sp + p.B * cp * cp) * st * st + p.C * ct * ct;
}

double kolosov_reduced_lagrangian(const RigidBodyParams& p, double phi, double theta,
                                  double phidot, double thetadot) {
  check_pole(theta);
  const double sp = std::sin(phi), cp = std::cos(phi);
  const double st = std::sin(theta), ct = std::cos(theta);
  const double q = (p.A * cp * cp + p.B * sp * sp) * p.C * ct * ct + p.A * p.B * st * st;
  const double r = (p.A * sp * sp + p.B * cp * cp) * p.C * st * st;
  const double cross = 2 * (p.A - p.B) * p.C * phidot * thetadot * sp * cp * st * ct;
  const double num = q * thetadot * thetadot + r * phidot * phidot - cross;
  return 0.5 * num / precession_inertia(p, phi, theta) - p.potential(phi, theta);
}

double psi_dot_zero_momentum(const RigidBodyParams& p, double phi, double theta, double phidot,
                             double thetadot) {
  check_pole(theta);
  const double sp = std::sin(phi), cp = std::cos(phi);
  const double st = std::sin(theta), ct = std::cos(theta);
  const double num = (p.A - p.B) * thetadot * sp * cp * st + p.C * phidot * ct;
  return -num / precession_inertia(p, phi, theta);
}

double lambda_average(std::span<const double> times, std::span<const double> psidot, double T) {
  if (times.size() != psidot.size() || times.size() < 2) {
    throw Error(ErrorKind::GridMismatch, "psidot samples do not match the time grid");
  }
  if (!(T > 0)) throw Error(ErrorKind::GridMismatch, "period must be positive");
  const double span = times.back() - times.front();
  if (std::abs(span - T) > 1e-9 * std::max(1.0, T)) {
    throw Error(ErrorKind::GridMismatch, "samples must cover exactly one period");
  }
  return simpson(times, psidot) / T;
}

double rotating_frame_residual(const Trajectory& full, double Lambda, double T) {
  full.validate();
  if (full.states.front().size() != 6) {
    throw Error(ErrorKind::GridMismatch, "expected rigid-body full states (phi, theta, psi, rates)");
  }
  const double t0 = full.times.front();
  const double t_end = full.times.back();
  if (!(T > 0) || t_end - t0 < T * (1 - 1e-12)) {
    throw Error(ErrorKind::SpanTooShort, "trajectory is shorter than one period");
  }
  const double slack = 1e-9 * std::max(1.0, T);
  double worst = 0.0;
  for (std::size_t i = 0; i < full.size(); ++i) {
    const double t = full.times[i];
    const double later = std::min(t + T, t_end);
    if (t + T > t_end + slack) break;
    const Vec& a = full.states[i];
    const Vec b = hermite_positions(full, later, 3);
    const double gap_phi = angle_gap(b[0] - a[0]);
    const double gap_theta = std::abs(b[1] - a[1]);
    const double gap_psi = angle_gap(b[2] - a[2] - Lambda * T);
    worst = std::max({worst, gap_phi, gap_theta, gap_psi});
  }
  return worst;
}

RelativeOrbit relative_orbit(const RigidBodyParams& p, const ReducedState& guess, double T_guess,
                             const RelativeOrbitConfig& cfg) {
  if (cfg.steps_per_period < 2) {
    throw Error(ErrorKind::InvalidParams, "steps_per_period must be >= 2");
  }
  const SymmetricSystem sys = rb_system(p);
  const MomentumValue f = MomentumValue::zero(sys);
  const OdeRhs rhs = [&sys, &f](double, const Vec& y) {
    const ReducedRhs r = reduced_rhs(sys, f, ReducedState::from_vector(2, y));
    Vec out(4);
    out << r.qdot, r.qddot;
    return out;
  };
  const int steps = cfg.steps_per_period;
  const FlowMap flow = [&](const Vec& s, double T) {
    IntegratorConfig ic;
    ic.dt = T / steps;
    return flow_to(rhs, s, 0.0, T, ic);
  };

  ShootConfig shoot = cfg.shoot;
  shoot.phase_index = 0;
  if (shoot.lift.size() == 0) {
    shoot.lift = Vec::Zero(4);
    if (guess.qdot[0] != 0.0) shoot.lift[0] = std::copysign(2 * std::numbers::pi, guess.qdot[0]);
  }
  RelativeOrbit out;
  out.reduced = shoot_periodic(flow, guess.to_vector(), T_guess, shoot);
  const double T = out.reduced.period;

  std::vector<double> grid(2 * steps + 1);
  for (int i = 0; i <= 2 * steps; ++i) grid[i] = 2 * T * i / (2 * steps);
  Trajectory red = integrate_on_grid(rhs, out.reduced.initial_state, grid);
  red.meta.system_id = sys.id;
  red.meta.chart_id = sys.chart;
  red.meta.momentum = f;
  out.full = reconstruct(sys, f, red, Vec::Zero(0), Vec::Zero(1));

  const std::span<const double> first(out.full.times.data(), steps + 1);
  std::vector<double> psidot(steps + 1);
  for (int i = 0; i <= steps; ++i) psidot[i] = out.full.states[i][5];
  out.Lambda = lambda_average(first, psidot, first.back() - first.front());
  out.endpoint_gap =
      std::abs(out.full.states[steps][2] - out.full.states[0][2] - out.Lambda * first.back());
  out.residual = rotating_frame_residual(out.full, out.Lambda, first.back());
  return out;
}

ReducedState lagrange_top_steady(const RigidBodyParams& p, double k, double theta0) {
  p.validate();
  check_pole(theta0);
  if (std::abs(p.A - p.B) > 1e-12 * (p.A + p.B)) {
    throw Error(ErrorKind::InvalidParams, "steady precession formula needs A = B");
  }
  const double ct = std::cos(theta0), st = std::sin(theta0);
  if (!(k * ct < 0)) throw Error(ErrorKind::InvalidParams, "steady precession needs k cos(theta0) < 0");
  // Zero axial momentum: psidot = -C phidot cos / D, D = A sin^2 + C cos^2.
  // Balance of the theta equation gives phidot^2 = -k D^2 / (A C^2 cos).
  const double d = p.A * st * st + p.C * ct * ct;
  const double phidot = std::sqrt(-k * d * d / (p.A * p.C * p.C * ct));
  Vec q(2), qd(2);
  q << 0.0, theta0;
  qd << phidot, 0.0;
  return {q, qd};
}

}  // namespace routh::rigidbody
