#include "helpers.hpp"

#include "routh/ellipsoid.hpp"
#include "routh/errors.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace routh;
using namespace routh::ellipsoid;
using namespace routh::testing;

namespace {

constexpr double kPi = std::numbers::pi;

RigidBodyParams body(double A = 1, double B = 2, double C = 3) {
  RigidBodyParams p;
  p.A = A;
  p.B = B;
  p.C = C;
  return p;
}

RigidBodyParams heavy(double k) {
  auto p = body();
  p.potential = rigidbody::heavy_potential(k);
  p.potential_name = "heavy";
  return p;
}

template <typename F>
ErrorKind kind_of(F&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::Config;
}

std::vector<Vec3> surface_points(const RigidBodyParams& p, int count, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<Vec3> out;
  for (int i = 0; i < count; ++i) {
    Vec3 w(g(rng), g(rng), g(rng));
    w.normalize();
    out.emplace_back(w.x() / std::sqrt(p.A), w.y() / std::sqrt(p.B), w.z() / std::sqrt(p.C));
  }
  return out;
}

// Tangent velocity at u from a random ambient vector.
Vec3 tangent(const RigidBodyParams& p, const Vec3& u, const Vec3& v) {
  const Vec3 g = surface_normal(p, u);
  return v - g.dot(v) / g.squaredNorm() * g;
}

ConformalData constant_potential(double h, double v) {
  return {h, {[v](const Vec3&) { return v; }, [](const Vec3&) { return Vec3::Zero().eval(); }}};
}

}  // namespace

TEST(KolosovMap, PolesAndSurface) {
  const auto p = body();
  const Vec3 north = kolosov_map(p, 0.7, 0.0).u;
  EXPECT_NEAR(north.x(), 0, 1e-16);
  EXPECT_NEAR(north.y(), 0, 1e-16);
  EXPECT_NEAR(north.z(), 1 / std::sqrt(3.0), 1e-16);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> a(-4, 4);
  for (int i = 0; i < 100; ++i) {
    EXPECT_NEAR(surface_residual(p, kolosov_map(p, a(rng), a(rng)).u), 0, 1e-15);
  }
  const auto s = kolosov_map(body(1, 1, 1), 0.4, 1.1);
  EXPECT_NEAR(s.u.x(), std::sin(1.1) * std::sin(0.4), 1e-16);
  EXPECT_NEAR(s.u.y(), std::sin(1.1) * std::cos(0.4), 1e-16);
  EXPECT_NEAR(s.u.z(), std::cos(1.1), 1e-16);
}

TEST(KolosovMap, TangentMapIsJacobian) {
  const auto p = body();
  const double phi = 0.4, theta = 1.1, pd = 0.7, td = -0.3, h = 1e-6;
  const Vec3 fd = (kolosov_map(p, phi + h * pd, theta + h * td).u -
                   kolosov_map(p, phi - h * pd, theta - h * td).u) / (2 * h);
  const auto s = kolosov_map(p, phi, theta, pd, td);
  EXPECT_LE((fd - s.udot).norm(), 1e-9);
  EXPECT_NEAR(surface_normal(p, s.u).dot(s.udot), 0, 1e-15);
  const AngleState back = inverse_kolosov_map(p, s);
  EXPECT_NEAR(back.phi, phi, 1e-14);
  EXPECT_NEAR(back.theta, theta, 1e-14);
  EXPECT_NEAR(back.phidot, pd, 1e-13);
  EXPECT_NEAR(back.thetadot, td, 1e-13);
}

TEST(ConformalFactor, SphereApexPositivity) {
  const double c = 2.0;
  for (const Vec3& u : surface_points(body(c, c, c), 20, 2)) EXPECT_NEAR(conformal_factor(body(c, c, c), u), c * c, 1e-14);
  EXPECT_NEAR(conformal_factor(body(), Vec3(0, 0, 1 / std::sqrt(3.0))), 2.0, 1e-15);
  for (const Vec3& u : surface_points(body(), 1000, 3)) EXPECT_GT(conformal_factor(body(), u), 0.0);
  EXPECT_EQ(kind_of([] { conformal_factor(body(), Vec3(1, 1, 1)); }), ErrorKind::OffSurface);
}

TEST(ConformalFactor, GradientMatchesFiniteDifference) {
  const auto p = body();
  const Vec3 u = surface_points(p, 1, 4)[0];
  auto s = [&](const Vec3& x) { return p.A * p.B * p.C / (p.A * p.A * x.x() * x.x() + p.B * p.B * x.y() * x.y() + p.C * p.C * x.z() * x.z()); };
  const Vec3 g = conformal_factor_gradient(p, u);
  for (int i = 0; i < 3; ++i) {
    Vec3 e = Vec3::Zero();
    e[i] = 1e-6;
    EXPECT_NEAR(g[i], (s(u + e) - s(u - e)) / 2e-6, 1e-7);
  }
}

TEST(ConformalFactor, ReflectionInvariance) {
  const auto p = body();
  const auto cd = make_conformal_data(p, 1.0);
  const auto ch = make_conformal_data(heavy(0.5), 1.0);
  for (const Vec3& u : surface_points(p, 50, 5)) {
    for (int axis = 0; axis < 3; ++axis) {
      Vec3 m = u;
      m[axis] = -m[axis];
      EXPECT_NEAR(conformal_factor(p, m), conformal_factor(p, u), 1e-14);
      EXPECT_NEAR(kolosov_potential(p, cd, m), kolosov_potential(p, cd, u), 1e-14);
      if (axis < 2) EXPECT_NEAR(kolosov_potential(heavy(0.5), ch, m), kolosov_potential(heavy(0.5), ch, u), 1e-12);
    }
  }
}

TEST(KolosovPotential, SpecialCases) {
  const auto p = body();
  for (const Vec3& u : surface_points(p, 10, 6)) EXPECT_EQ(kolosov_potential(p, constant_potential(0.8, 0.8), u), 0.0);
  const auto sphere = body(1, 1, 1);
  for (const Vec3& u : surface_points(sphere, 10, 7)) {
    EXPECT_NEAR(kolosov_potential(sphere, make_conformal_data(sphere, 1.0), u), -1.0, 1e-14);
  }
  const auto cd = make_conformal_data(p, 0.3);
  for (const Vec3& u : surface_points(p, 1000, 8)) EXPECT_LT(kolosov_potential(p, cd, u), 0.0);
}

TEST(KolosovPotential, HeavyPullback) {
  const auto p = heavy(0.5);
  const auto cd = make_conformal_data(p, 2.0);
  const double phi = 0.3, theta = 0.8;
  const Vec3 u = kolosov_map(p, phi, theta).u;
  EXPECT_NEAR(cd.V.value(u), 0.5 * std::cos(theta), 1e-14);
  // radial extension: dV/dz = k sqrt(C) sin^2 theta on the surface
  EXPECT_NEAR(cd.V.gradient(u).z(), 0.5 * std::sqrt(3.0) * std::pow(std::sin(theta), 2), 1e-7);
  EXPECT_NEAR(max_potential(p), 0.5, 1e-12);
}

TEST(ConstrainedRhs, GreatCircleOnUnitSphere) {
  const auto p = body(1, 1, 1);
  const auto cd = make_conformal_data(p, 1.0);
  for (const Vec3& u : surface_points(p, 20, 9)) {
    const Vec3 v = tangent(p, u, Vec3(0.3, -0.7, 1.1));
    for (TimeScale scale : {TimeScale::Physical, TimeScale::Conformal}) {
      const auto r = constrained_rhs(p, cd, {u, v}, scale);
      EXPECT_LE((r.uddot + v.squaredNorm() * u / u.squaredNorm()).norm(), 1e-13);
    }
  }
}

TEST(ConstrainedRhs, OneStepStaysOnSurface) {
  const auto p = heavy(0.4);
  const auto cd = make_conformal_data(p, 1.5);
  const Vec3 u = kolosov_map(p, 0.5, 1.0).u;
  const EllipsoidState s0{u, tangent(p, u, Vec3(0.4, 0.2, -0.5))};
  const Trajectory t = integrate_constrained(p, cd, s0, 0, 1e-3, {Method::Rk4Fixed, 1e-3},
                                             TimeScale::Physical, false);
  const Vec& s1 = t.back();
  EXPECT_LE(std::abs(surface_residual(p, s1.head<3>())), 1e-9);
}

TEST(ConstrainedRhs, Errors) {
  const auto p = body();
  const auto cd = make_conformal_data(p, 1.0);
  const Vec3 u = kolosov_map(p, 0.5, 1.0).u;
  EXPECT_EQ(kind_of([&] { constrained_rhs(p, cd, {1.01 * u, Vec3::Zero()}); }), ErrorKind::OffSurface);
  EXPECT_EQ(kind_of([&] { constrained_rhs(p, cd, {u, surface_normal(p, u)}); }), ErrorKind::TangencyViolation);
}

TEST(ConstrainedFlow, EnergyAndSurfacePreserved) {
  const auto p = heavy(0.4);
  const auto cd = make_conformal_data(p, 1.5);
  const Vec3 u = kolosov_map(p, 0.5, 1.0).u;
  const EllipsoidState s0{u, tangent(p, u, Vec3(0.4, 0.2, -0.5))};
  for (TimeScale scale : {TimeScale::Physical, TimeScale::Conformal}) {
    const Trajectory t = integrate_constrained(p, cd, s0, 0, 10, {Method::Rk4Fixed, 1e-3}, scale);
    double drift = 0, surf = 0;
    for (const Vec& s : t.states) {
      const auto e = EllipsoidState::from_vector(s);
      surf = std::max(surf, std::abs(surface_residual(p, e.u)));
      drift = std::max(drift, std::abs(constrained_energy(p, cd, e, scale) - t.meta.energy0));
    }
    EXPECT_LE(surf, 1e-8);
    EXPECT_LE(drift, 1e-7);
  }
}

TEST(Maupertuis, Speed) {
  const auto sphere = body(1, 1, 1);
  const Vec3 u = kolosov_map(sphere, 0.2, 0.9).u;
  EXPECT_EQ(maupertuis_speed(body(), 1.0, {kolosov_map(body(), 0.2, 0.9).u, Vec3::Zero()}), 0.0);
  const Vec3 v = tangent(sphere, u, Vec3(1, 2, 3));
  EXPECT_NEAR(maupertuis_speed(sphere, 1.0, {u, v}), v.norm(), 1e-14);
}

TEST(Equivalence, FreeBodyImageIsConformalFlow) {
  ReducedState r0{vec({0.4, 1.2}), vec({0.7, 0.3})};
  const auto eq = kolosov_equivalence(body(), r0, 10.0, {Method::Rk4Fixed, 1e-3});
  EXPECT_LE(eq.energy_relation, 1e-6);
  EXPECT_LE(eq.sup_distance, 1e-5);
  EXPECT_LE(eq.speed_variation, 1e-5);
  for (const Vec& s : eq.image.states) EXPECT_LE(std::abs(surface_residual(body(), s.head<3>())), 1e-12);
}

TEST(Equivalence, HeavyBodyImageIsConformalFlow) {
  ReducedState r0{vec({0.4, 1.2}), vec({0.7, 0.3})};
  const auto eq = kolosov_equivalence(heavy(0.5), r0, 5.0, {Method::Rk4Fixed, 1e-3});
  EXPECT_LE(eq.energy_relation, 1e-6);
  EXPECT_LE(eq.sup_distance, 1e-5);
}

TEST(Sections, SphereGreatCircles) {
  const auto p = body(1, 1, 1);
  const double h = 0.5;
  const auto orbits = principal_section_orbits(p, make_conformal_data(p, h));
  for (const auto& o : orbits) {
    EXPECT_LE(o.orbit.closure_error, 1e-8);
    EXPECT_NEAR(o.orbit.period, orbits[0].orbit.period, 1e-8);
    EXPECT_NEAR(o.sigma_length, 2 * kPi * std::sqrt(h), 1e-8);
  }
}

TEST(Sections, TriaxialFreeBody) {
  const auto p = body();
  const auto cd = make_conformal_data(p, 1.0);
  const auto orbits = principal_section_orbits(p, cd);
  for (const auto& o : orbits) {
    EXPECT_LE(o.orbit.closure_error, 1e-8);
    EXPECT_LE(o.max_off_plane, 1e-10);
    EXPECT_NEAR(o.orbit.period, o.period_estimate, 1e-6);
  }
  EXPECT_GT(std::abs(orbits[0].orbit.period - orbits[1].orbit.period), 1e-3);
  EXPECT_GT(std::abs(orbits[1].orbit.period - orbits[2].orbit.period), 1e-3);
  EXPECT_GT(std::abs(orbits[0].orbit.period - orbits[2].orbit.period), 1e-3);
  // Regression anchors (conformal time).
  EXPECT_NEAR(orbits[0].orbit.period, 1.85120122423, 1e-9);
  EXPECT_NEAR(orbits[1].orbit.period, 2 * kPi / 3, 1e-9);
  EXPECT_NEAR(orbits[2].orbit.period, 1.92382474524, 1e-9);
}

TEST(Sections, RefusesLowEnergy) {
  const auto p = heavy(0.5);
  EXPECT_EQ(kind_of([&] { principal_section_orbits(p, make_conformal_data(p, 0.4)); }), ErrorKind::InvalidParams);
  EXPECT_EQ(kind_of([&] { section_orbit(p, make_conformal_data(p, 2.0), Section::Z); }), ErrorKind::InvalidParams);
}

TEST(Sections, ReducedOrbitIsRelativelyPeriodic) {
  const auto p = body();
  const auto cd = make_conformal_data(p, 1.0);
  const auto so = section_orbit(p, cd, Section::Z);
  const auto sr = section_reduced_orbit(p, cd, so);
  EXPECT_NEAR(sr.r0.q[1], kPi / 2, 1e-12);
  const auto o = rigidbody::relative_orbit(sr.params, sr.r0, sr.period);
  EXPECT_NEAR(o.reduced.period, sr.period, 1e-7);
  EXPECT_LE(o.endpoint_gap, 1e-8);
  EXPECT_LE(o.residual, 1e-6);
  EXPECT_NEAR(o.Lambda, 0.0, 1e-12);
}
