#include "routh/ellipsoid.hpp"

#include "routh/errors.hpp"
#include "routh/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace routh::ellipsoid {

namespace {

constexpr double kPi = std::numbers::pi;

// Looser guard used inside integrators: RK stages leave the surface by O(dt^2).
constexpr double kStageSurfaceTol = 1e-2;

double metric_sum(const RigidBodyParams& p, const Vec3& u) {
  return p.A * p.A * u.x() * u.x() + p.B * p.B * u.y() * u.y() + p.C * p.C * u.z() * u.z();
}

void check_surface(const RigidBodyParams& p, const Vec3& u, double tol) {
  if (!u.allFinite() || std::abs(surface_residual(p, u)) > tol) {
    throw Error(ErrorKind::OffSurface, "point is not on the inertia ellipsoid");
  }
}

struct Field {
  double kinetic;
  Vec3 kinetic_grad;
  double potential;
  Vec3 potential_grad;
};

Field field(const RigidBodyParams& p, const ConformalData& cd, const Vec3& u, TimeScale scale) {
  const double a = p.A * p.B * p.C / metric_sum(p, u);
  const Vec3 ga = conformal_factor_gradient(p, u);
  const double v = cd.V.value(u);
  const Vec3 gv = cd.V.gradient(u);
  if (scale == TimeScale::Physical) return {a, ga, v, gv};
  return {1.0, Vec3::Zero(), a * (v - cd.h), ga * (v - cd.h) + a * gv};
}

// Cyclic relabelling that turns a section plane into z = 0:
// new coordinates are (u[i0], u[i1], u[i2]).
std::array<int, 3> relabel_order(Section s) {
  switch (s) {
    case Section::Z: return {0, 1, 2};
    case Section::X: return {1, 2, 0};
    case Section::Y: return {2, 0, 1};
  }
  return {0, 1, 2};
}

struct Seed {
  Vec3 u;
  Vec3 dir;
  int phase_index;
  int off_plane;
};

Seed section_seed(const RigidBodyParams& p, Section s) {
  switch (s) {
    case Section::Z: return {Vec3(0, 1 / std::sqrt(p.B), 0), Vec3(1, 0, 0), 0, 2};
    case Section::X: return {Vec3(0, 1 / std::sqrt(p.B), 0), Vec3(0, 0, 1), 2, 0};
    case Section::Y: return {Vec3(0, 0, 1 / std::sqrt(p.C)), Vec3(1, 0, 0), 0, 1};
  }
  return {};
}

// Point of the section ellipse at parameter alpha.
Vec3 section_point(const RigidBodyParams& p, Section s, double alpha) {
  const double sa = std::sin(alpha), ca = std::cos(alpha);
  switch (s) {
    case Section::Z: return {sa / std::sqrt(p.A), ca / std::sqrt(p.B), 0};
    case Section::X: return {0, ca / std::sqrt(p.B), sa / std::sqrt(p.C)};
    case Section::Y: return {sa / std::sqrt(p.A), 0, ca / std::sqrt(p.C)};
  }
  return Vec3::Zero();
}

Vec3 section_tangent(const RigidBodyParams& p, Section s, double alpha) {
  const double sa = std::sin(alpha), ca = std::cos(alpha);
  switch (s) {
    case Section::Z: return {ca / std::sqrt(p.A), -sa / std::sqrt(p.B), 0};
    case Section::X: return {0, -sa / std::sqrt(p.B), ca / std::sqrt(p.C)};
    case Section::Y: return {ca / std::sqrt(p.A), 0, -sa / std::sqrt(p.C)};
  }
  return Vec3::Zero();
}

}  // namespace

Vec EllipsoidState::to_vector() const {
  Vec v(6);
  v << u, udot;
  return v;
}

EllipsoidState EllipsoidState::from_vector(const Vec& v) {
  if (v.size() != 6) throw Error(ErrorKind::InvalidParams, "ellipsoid state has 6 components");
  return {v.head<3>(), v.tail<3>()};
}

double surface_residual(const RigidBodyParams& p, const Vec3& u) {
  return p.A * u.x() * u.x() + p.B * u.y() * u.y() + p.C * u.z() * u.z() - 1.0;
}

Vec3 surface_normal(const RigidBodyParams& p, const Vec3& u) {
  return {2 * p.A * u.x(), 2 * p.B * u.y(), 2 * p.C * u.z()};
}

EllipsoidState kolosov_map(const RigidBodyParams& p, double phi, double theta, double phidot,
                           double thetadot) {
  const double sp = std::sin(phi), cp = std::cos(phi);
  const double st = std::sin(theta), ct = std::cos(theta);
  const double ra = 1 / std::sqrt(p.A), rb = 1 / std::sqrt(p.B), rc = 1 / std::sqrt(p.C);
  EllipsoidState s;
  s.u = Vec3(st * sp * ra, st * cp * rb, ct * rc);
  s.udot = Vec3((ct * sp * thetadot + st * cp * phidot) * ra,
                (ct * cp * thetadot - st * sp * phidot) * rb, -st * thetadot * rc);
  return s;
}

AngleState inverse_kolosov_map(const RigidBodyParams& p, const EllipsoidState& s) {
  Vec3 w(std::sqrt(p.A) * s.u.x(), std::sqrt(p.B) * s.u.y(), std::sqrt(p.C) * s.u.z());
  w.normalize();
  const double theta = std::acos(std::clamp(w.z(), -1.0, 1.0));
  const double phi = std::atan2(w.x(), w.y());
  const double sp = std::sin(phi), cp = std::cos(phi);
  const double st = std::sin(theta), ct = std::cos(theta);
  const double ra = 1 / std::sqrt(p.A), rb = 1 / std::sqrt(p.B), rc = 1 / std::sqrt(p.C);
  Eigen::Matrix<double, 3, 2> jac;
  jac << st * cp * ra, ct * sp * ra,
        -st * sp * rb, ct * cp * rb,
         0.0, -st * rc;
  const Eigen::Vector2d rates = jac.colPivHouseholderQr().solve(s.udot);
  return {phi, theta, rates[0], rates[1]};
}

double conformal_factor(const RigidBodyParams& p, const Vec3& u) {
  check_surface(p, u, kSurfaceTol);
  return p.A * p.B * p.C / metric_sum(p, u);
}

Vec3 conformal_factor_gradient(const RigidBodyParams& p, const Vec3& u) {
  const double s = metric_sum(p, u);
  const double k = -p.A * p.B * p.C / (s * s);
  return k * Vec3(2 * p.A * p.A * u.x(), 2 * p.B * p.B * u.y(), 2 * p.C * p.C * u.z());
}

SurfacePotential pullback_potential(const RigidBodyParams& p) {
  if (p.potential_name == "none") {
    return {[](const Vec3&) { return 0.0; }, [](const Vec3&) { return Vec3::Zero().eval(); }};
  }
  auto value = [p](const Vec3& u) {
    Vec3 w(std::sqrt(p.A) * u.x(), std::sqrt(p.B) * u.y(), std::sqrt(p.C) * u.z());
    w.normalize();
    const double theta = std::acos(std::clamp(w.z(), -1.0, 1.0));
    const double phi = std::atan2(w.x(), w.y());
    return p.potential(phi, theta);
  };
  auto gradient = [value](const Vec3& u) {
    Vec3 g;
    for (int i = 0; i < 3; ++i) {
      const double h = 1e-6 * std::max(1.0, std::abs(u[i]));
      Vec3 up = u, um = u;
      up[i] += h;
      um[i] -= h;
      g[i] = (value(up) - value(um)) / (2 * h);
    }
    return g;
  };
  return {value, gradient};
}

ConformalData make_conformal_data(const RigidBodyParams& p, double h) {
  p.validate();
  if (!std::isfinite(h)) throw Error(ErrorKind::InvalidParams, "energy constant is not finite");
  return {h, pullback_potential(p)};
}

double max_potential(const RigidBodyParams& p) {
  double best = -std::numeric_limits<double>::infinity();
  constexpr int kTheta = 181, kPhi = 360;
  for (int i = 0; i < kTheta; ++i) {
    const double theta = kPi * i / (kTheta - 1);
    for (int j = 0; j < kPhi; ++j) {
      best = std::max(best, p.potential(2 * kPi * j / kPhi, theta));
    }
  }
  return best;
}

double kolosov_potential(const RigidBodyParams& p, const ConformalData& cd, const Vec3& u) {
  return conformal_factor(p, u) * (cd.V.value(u) - cd.h);
}

Vec3 kolosov_potential_gradient(const RigidBodyParams& p, const ConformalData& cd, const Vec3& u) {
  check_surface(p, u, kSurfaceTol);
  return field(p, cd, u, TimeScale::Conformal).potential_grad;
}

ConstrainedRhs constrained_rhs(const RigidBodyParams& p, const ConformalData& cd,
                               const EllipsoidState& s, TimeScale scale, double surface_tol) {
  check_surface(p, s.u, surface_tol);
  const Vec3 g = surface_normal(p, s.u);
  const double g2 = g.squaredNorm();
  if (!s.udot.allFinite() ||
      std::abs(g.dot(s.udot)) > surface_tol * std::max(1.0, std::sqrt(g2) * s.udot.norm())) {
    throw Error(ErrorKind::TangencyViolation, "velocity is not tangent to the ellipsoid");
  }
  const Field f = field(p, cd, s.u, scale);
  const Vec3& v = s.udot;
  const Vec3 r = -f.kinetic_grad.dot(v) * v + 0.5 * v.squaredNorm() * f.kinetic_grad -
                 f.potential_grad;
  const Vec3 hv(2 * p.A * v.x(), 2 * p.B * v.y(), 2 * p.C * v.z());
  const double lambda = (-f.kinetic * v.dot(hv) - g.dot(r)) / g2;
  return {v, (lambda * g + r) / f.kinetic, lambda};
}

double constrained_energy(const RigidBodyParams& p, const ConformalData& cd,
                          const EllipsoidState& s, TimeScale scale) {
  check_surface(p, s.u, kSurfaceTol);
  const Field f = field(p, cd, s.u, scale);
  return 0.5 * f.kinetic * s.udot.squaredNorm() + f.potential;
}

void project_to_surface(const RigidBodyParams& p, Vec& state) {
  Vec3 u = state.head<3>();
  for (int it = 0; it < 3; ++it) {
    const Vec3 g = surface_normal(p, u);
    u -= surface_residual(p, u) / g.squaredNorm() * g;
  }
  const Vec3 g = surface_normal(p, u);
  Vec3 v = state.tail<3>();
  v -= g.dot(v) / g.squaredNorm() * g;
  state << u, v;
}

void project_to_energy(const RigidBodyParams& p, const ConformalData& cd, TimeScale scale,
                       double energy, Vec& state) {
  project_to_surface(p, state);
  const Vec3 u = state.head<3>();
  const Field f = field(p, cd, u, scale);
  const double kin = energy - f.potential;
  const double speed2 = state.tail<3>().squaredNorm();
  if (kin > 0 && speed2 > 0) {
    state.tail<3>() *= std::sqrt(2 * kin / (f.kinetic * speed2));
  }
}

namespace {

OdeRhs ode_rhs(const RigidBodyParams& p, const ConformalData& cd, TimeScale scale) {
  return [&p, &cd, scale](double, const Vec& y) {
    const auto r = constrained_rhs(p, cd, EllipsoidState::from_vector(y), scale, kStageSurfaceTol);
    Vec out(6);
    out << r.udot, r.uddot;
    return out;
  };
}

}  // namespace

Trajectory integrate_constrained(const RigidBodyParams& p, const ConformalData& cd,
                                 const EllipsoidState& s0, double t0, double t1,
                                 const IntegratorConfig& cfg, TimeScale scale, bool project) {
  constrained_rhs(p, cd, s0, scale);
  StepProjection proj;
  if (project) proj = [&p](Vec& y) { project_to_surface(p, y); };
  Trajectory out = integrate_ode(ode_rhs(p, cd, scale), s0.to_vector(), t0, t1, cfg, proj);
  out.meta.system_id = "ellipsoid";
  out.meta.chart_id = "ambient(x,y,z)";
  out.meta.energy0 = constrained_energy(p, cd, s0, scale);
  return out;
}

Trajectory integrate_constrained_on_grid(const RigidBodyParams& p, const ConformalData& cd,
                                         const EllipsoidState& s0, std::span<const double> grid,
                                         TimeScale scale) {
  constrained_rhs(p, cd, s0, scale);
  Trajectory out = integrate_on_grid(ode_rhs(p, cd, scale), s0.to_vector(), grid,
                                     [&p](Vec& y) { project_to_surface(p, y); });
  out.meta.system_id = "ellipsoid";
  out.meta.chart_id = "ambient(x,y,z)";
  out.meta.energy0 = constrained_energy(p, cd, s0, scale);
  return out;
}

double maupertuis_speed(const RigidBodyParams& p, double h, const EllipsoidState& s) {
  check_surface(p, s.u, kSurfaceTol);
  return std::sqrt(h * p.A * p.B * p.C) * s.udot.norm() / std::sqrt(metric_sum(p, s.u));
}

SectionOrbit section_orbit(const RigidBodyParams& p, const ConformalData& cd, Section plane,
                           const SectionConfig& cfg) {
  p.validate();
  const double vmax = max_potential(p);
  if (!(cd.h > vmax)) {
    throw Error(ErrorKind::InvalidParams,
                "closed geodesics need the energy constant to satisfy h > max V0 (h = " +
                    std::to_string(cd.h) + ", max V0 = " + std::to_string(vmax) + ")");
  }
  const Seed seed = section_seed(p, plane);
  for (int i = 0; i < 64; ++i) {
    const Vec3 u = section_point(p, plane, 2 * kPi * i / 64);
    if (std::abs(cd.V.gradient(u)[seed.off_plane]) > 1e-7 * std::max(1.0, std::abs(cd.h))) {
      throw Error(ErrorKind::InvalidParams,
                  "the potential is not even under the reflection that fixes this section");
    }
  }
  const OdeRhs rhs = ode_rhs(p, cd, TimeScale::Conformal);
  const StepProjection on_level = [&p, &cd](Vec& y) {
    project_to_energy(p, cd, TimeScale::Conformal, 0.0, y);
  };

  // |u'| = sqrt(-2 W) on the zero level; the loop integral of ds/|u'| is the
  // period of the planar orbit.
  constexpr int kLoop = 4096;
  double period_estimate = 0.0;
  for (int i = 0; i < kLoop; ++i) {
    const double alpha = 2 * kPi * i / kLoop;
    const Vec3 u = section_point(p, plane, alpha);
    const double speed = std::sqrt(-2 * kolosov_potential(p, cd, u));
    period_estimate += section_tangent(p, plane, alpha).norm() / speed;
  }
  period_estimate *= 2 * kPi / kLoop;

  Vec guess(6);
  guess << seed.u, seed.dir;
  on_level(guess);

  const FlowMap flow = [&](const Vec& s, double T) {
    return flow_to(rhs, s, 0.0, T, cfg.flow, on_level);
  };
  ShootConfig shoot = cfg.shoot;
  shoot.phase_index = seed.phase_index;
  shoot.project = on_level;
  SectionOrbit result;
  result.plane = plane;
  result.period_estimate = period_estimate;
  result.orbit = shoot_periodic(flow, guess, period_estimate, shoot);

  const Trajectory loop = integrate_ode(rhs, result.orbit.initial_state, 0.0,
                                        result.orbit.period, cfg.flow, on_level);
  std::vector<double> density(loop.size());
  for (std::size_t i = 0; i < loop.size(); ++i) {
    const Vec3 u = loop.states[i].head<3>();
    const Vec3 up = loop.states[i].tail<3>();
    const double a = p.A * p.B * p.C / metric_sum(p, u);
    density[i] = std::sqrt(a * (cd.h - cd.V.value(u))) * up.norm();
    result.max_off_plane = std::max(result.max_off_plane, std::abs(u[seed.off_plane]));
  }
  result.sigma_length = simpson(loop.times, density);
  return result;
}

std::array<SectionOrbit, 3> principal_section_orbits(const RigidBodyParams& p,
                                                     const ConformalData& cd,
                                                     const SectionConfig& cfg) {
  return {section_orbit(p, cd, Section::X, cfg), section_orbit(p, cd, Section::Y, cfg),
          section_orbit(p, cd, Section::Z, cfg)};
}

SectionReducedOrbit section_reduced_orbit(const RigidBodyParams& p, const ConformalData& cd,
                                          const SectionOrbit& orbit) {
  const auto order = relabel_order(orbit.plane);
  const std::array<double, 3> moments{p.A, p.B, p.C};
  RigidBodyParams q;
  q.A = moments[order[0]];
  q.B = moments[order[1]];
  q.C = moments[order[2]];
  q.potential_name = p.potential_name;
  if (p.potential_name == "none") {
    q.potential = rigidbody::free_potential();
  } else {
    // V0'(angles') = V0 o F^{-1} o relabel^{-1} o F'(angles')
    const SurfacePotential original = pullback_potential(p);
    q.potential = [q_moments = q, order, original](double phi, double theta) {
      const Vec3 w = kolosov_map(q_moments, phi, theta).u;
      Vec3 u;
      for (int i = 0; i < 3; ++i) u[order[i]] = w[i];
      return original.value(u);
    };
  }

  // Physical period: dt = A(u) dtau along one loop.
  const IntegratorConfig flow{Method::Rk45Adaptive, 1e-2, 1e-13, 1e-13, 10'000'000};
  const OdeRhs rhs = ode_rhs(p, cd, TimeScale::Conformal);
  const Trajectory loop = integrate_ode(rhs, orbit.orbit.initial_state, 0.0, orbit.orbit.period,
                                        flow, [&p](Vec& y) { project_to_surface(p, y); });
  std::vector<double> factor(loop.size());
  for (std::size_t i = 0; i < loop.size(); ++i) {
    const Vec3 u = loop.states[i].head<3>();
    factor[i] = p.A * p.B * p.C / metric_sum(p, u);
  }

  const Vec& s0 = orbit.orbit.initial_state;
  const double a0 = p.A * p.B * p.C / metric_sum(p, s0.head<3>());
  EllipsoidState relabelled;
  for (int i = 0; i < 3; ++i) {
    relabelled.u[i] = s0[order[i]];
    relabelled.udot[i] = s0[3 + order[i]] / a0;  // du/dt = u' / A(u)
  }
  const AngleState angles = inverse_kolosov_map(q, relabelled);
  SectionReducedOrbit out;
  out.params = q;
  Vec rq(2), rv(2);
  rq << angles.phi, angles.theta;
  rv << angles.phidot, angles.thetadot;
  out.r0 = {rq, rv};
  out.period = simpson(loop.times, factor);
  return out;
}

Equivalence kolosov_equivalence(const RigidBodyParams& p, const ReducedState& r0, double t_end,
                                const IntegratorConfig& cfg) {
  const SymmetricSystem sys = rigidbody::rb_system(p);
  const MomentumValue f = MomentumValue::zero(sys);
  const Trajectory red = integrate_reduced(sys, f, r0, 0.0, t_end, cfg);

  Equivalence out;
  out.h = reduced_energy(sys, f, r0);
  const ConformalData cd = make_conformal_data(p, out.h);

  std::vector<EllipsoidState> physical(red.size());
  for (std::size_t i = 0; i < red.size(); ++i) {
    const Vec& s = red.states[i];
    physical[i] = kolosov_map(p, s[0], s[1], s[2], s[3]);
  }
  const TimeFactor factor = [&p](const Vec& s) {
    return conformal_factor(p, kolosov_map(p, s[0], s[1]).u);
  };
  const Trajectory tau = reparametrize_time(red, factor);

  out.image.times = tau.times;
  out.image.meta = {"ellipsoid", "ambient(x,y,z)", std::nullopt, 0.0};
  double smin = std::numeric_limits<double>::infinity(), smax = 0.0, ssum = 0.0;
  for (std::size_t i = 0; i < red.size(); ++i) {
    const EllipsoidState& e = physical[i];
    const double a = conformal_factor(p, e.u);
    const Vec3 uprime = a * e.udot;
    out.image.states.push_back(EllipsoidState{e.u, uprime}.to_vector());
    const double kin = 0.5 * uprime.squaredNorm();
    const double target = a * (out.h - cd.V.value(e.u));
    out.energy_relation = std::max(out.energy_relation, std::abs(kin - target) / (a * std::abs(out.h)));
    const double speed = maupertuis_speed(p, out.h, e);
    smin = std::min(smin, speed);
    smax = std::max(smax, speed);
    ssum += speed;
  }
  out.speed_variation = (smax - smin) / (ssum / static_cast<double>(red.size()));

  out.constrained = integrate_constrained_on_grid(
      p, cd, EllipsoidState::from_vector(out.image.front()), out.image.times);
  for (std::size_t i = 0; i < red.size(); ++i) {
    out.sup_distance = std::max(
        out.sup_distance, (out.image.states[i] - out.constrained.states[i]).cwiseAbs().maxCoeff());
  }
  return out;
}

}  // namespace routh::ellipsoid
