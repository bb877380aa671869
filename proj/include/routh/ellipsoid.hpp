#pragma once

#include "routh/integrate.hpp"
#include "routh/rigidbody.hpp"

#include <array>
#include <functional>

namespace routh::ellipsoid {

using Vec3 = Eigen::Vector3d;
using rigidbody::RigidBodyParams;

/// Tolerance on |Phi(u)| for public entry points.
inline constexpr double kSurfaceTol = 1e-8;

/// Point and velocity on E^2 : A x^2 + B y^2 + C z^2 = 1.
struct EllipsoidState {
  Vec3 u = Vec3::Zero();
  Vec3 udot = Vec3::Zero();

  Vec to_vector() const;
  static EllipsoidState from_vector(const Vec& v);
};

struct SurfacePotential {
  std::function<double(const Vec3&)> value;
  std::function<Vec3(const Vec3&)> gradient;
};

/// Energy level h and the potential V = V0 o F^{-1} on the ellipsoid.
struct ConformalData {
  double h = 1.0;
  SurfacePotential V;
};

double surface_residual(const RigidBodyParams& p, const Vec3& u);
Vec3 surface_normal(const RigidBodyParams& p, const Vec3& u);

/// F(phi, theta) = (sin t sin f / sqrt A, sin t cos f / sqrt B, cos t / sqrt C)
/// together with the image of (phidot, thetadot) under its Jacobian.
EllipsoidState kolosov_map(const RigidBodyParams& p, double phi, double theta, double phidot = 0,
                           double thetadot = 0);

struct AngleState {
  double phi, theta, phidot, thetadot;
};

/// Inverse of kolosov_map away from the apexes; velocity by least squares
/// on the two Jacobian columns.
AngleState inverse_kolosov_map(const RigidBodyParams& p, const EllipsoidState& s);

/// A(u) = ABC / (A^2 x^2 + B^2 y^2 + C^2 z^2). Throws OffSurface.
double conformal_factor(const RigidBodyParams& p, const Vec3& u);
Vec3 conformal_factor_gradient(const RigidBodyParams& p, const Vec3& u);

/// V0 pulled back through F^{-1}. Gradient by central differences of a
/// radial extension; normal components drop out of the constrained flow.
SurfacePotential pullback_potential(const RigidBodyParams& p);

ConformalData make_conformal_data(const RigidBodyParams& p, double h);

/// Maximum of V0 over a dense (phi, theta) sample.
double max_potential(const RigidBodyParams& p);

/// A(u) (V(u) - h). Throws OffSurface.
double kolosov_potential(const RigidBodyParams& p, const ConformalData& cd, const Vec3& u);
Vec3 kolosov_potential_gradient(const RigidBodyParams& p, const ConformalData& cd, const Vec3& u);

/// Physical: Lagrangian A(u) |udot|^2 / 2 - V(u) in time t.
/// Conformal: Lagrangian |u'|^2 / 2 - A(u)(V(u) - h) in time tau, zero energy.
enum class TimeScale { Physical, Conformal };

struct ConstrainedRhs {
  Vec3 udot;
  Vec3 uddot;
  double lambda;
};

/// Acceleration and multiplier from the constrained Euler equations plus the
/// second derivative of the constraint. Throws OffSurface / TangencyViolation
/// when the state is farther than surface_tol from the invariants.
ConstrainedRhs constrained_rhs(const RigidBodyParams& p, const ConformalData& cd,
                               const EllipsoidState& s, TimeScale scale = TimeScale::Conformal,
                               double surface_tol = kSurfaceTol);

/// kinetic factor * |udot|^2 / 2 + potential for the chosen time scale.
double constrained_energy(const RigidBodyParams& p, const ConformalData& cd,
                          const EllipsoidState& s, TimeScale scale);

/// Projects u onto Phi = 0 along the normal and udot onto the tangent plane.
void project_to_surface(const RigidBodyParams& p, Vec& state);
/// project_to_surface, then rescale the velocity onto the given energy level.
void project_to_energy(const RigidBodyParams& p, const ConformalData& cd, TimeScale scale,
                       double energy, Vec& state);

Trajectory integrate_constrained(const RigidBodyParams& p, const ConformalData& cd,
                                 const EllipsoidState& s0, double t0, double t1,
                                 const IntegratorConfig& cfg,
                                 TimeScale scale = TimeScale::Conformal, bool project = true);

Trajectory integrate_constrained_on_grid(const RigidBodyParams& p, const ConformalData& cd,
                                         const EllipsoidState& s0, std::span<const double> grid,
                                         TimeScale scale = TimeScale::Conformal);

/// dSigma-norm of udot: sqrt(h ABC) |udot| / sqrt(A^2 x^2 + B^2 y^2 + C^2 z^2).
double maupertuis_speed(const RigidBodyParams& p, double h, const EllipsoidState& s);

enum class Section { X, Y, Z };  // the plane {x=0}, {y=0}, {z=0}

struct SectionOrbit {
  Section plane;
  PeriodicOrbit orbit;        // in conformal time tau
  double sigma_length = 0.0;  // dSigma-length of the closed geodesic
  double max_off_plane = 0.0;
  double period_estimate = 0.0;  // loop quadrature of ds / |u'|
};

struct SectionConfig {
  IntegratorConfig flow{Method::Rk45Adaptive, 1e-2, 1e-13, 1e-13, 10'000'000};
  ShootConfig shoot{};
};

/// Closed geodesic in one coordinate plane: seed on the plane, refine by
/// shooting on the zero-energy level. Requires h > max V0.
SectionOrbit section_orbit(const RigidBodyParams& p, const ConformalData& cd, Section plane,
                           const SectionConfig& cfg = {});

/// All three sections, in the order X, Y, Z. The potential must be even
/// under the matching reflections.
std::array<SectionOrbit, 3> principal_section_orbits(const RigidBodyParams& p,
                                                     const ConformalData& cd,
                                                     const SectionConfig& cfg = {});

/// The same section orbit as a reduced orbit on the equator theta = pi/2 of a
/// body whose axes are cyclically relabelled so the section plane is z = 0.
struct SectionReducedOrbit {
  RigidBodyParams params;  // relabelled body
  ReducedState r0;
  double period = 0.0;  // physical time
};

SectionReducedOrbit section_reduced_orbit(const RigidBodyParams& p, const ConformalData& cd,
                                          const SectionOrbit& orbit);

/// Image of a zero-momentum reduced trajectory on the ellipsoid, compared
/// with the conformal constrained flow.
struct Equivalence {
  double h = 0.0;
  Trajectory image;          // (u, u') on the tau grid
  Trajectory constrained;    // conformal flow from image.front() on the same grid
  double energy_relation = 0.0;  // max |u'|^2/2 - A(u)(h - V)| / (A(u) h)
  double sup_distance = 0.0;     // max-norm gap of (u, u') between the two
  double speed_variation = 0.0;  // (max - min) / mean of the dSigma-speed; V0 = 0 only
};

Equivalence kolosov_equivalence(const RigidBodyParams& p, const ReducedState& r0, double t_end,
                                const IntegratorConfig& cfg);

}  // namespace routh::ellipsoid
