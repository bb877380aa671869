#pragma once

#include "routh/integrate.hpp"
#include "routh/system.hpp"

#include <functional>
#include <span>
#include <string>

namespace routh::rigidbody {

/// Axially symmetric potential V0(phi, theta); it never sees psi.
using AnglePotential = std::function<double(double phi, double theta)>;

struct RigidBodyParams {
  double A = 1.0;
  double B = 2.0;
  double C = 3.0;
  AnglePotential potential = [](double, double) { return 0.0; };
  std::string potential_name = "none";

  /// Throws InvalidParams unless A, B, C > 0 and each is at most the sum of
  /// the other two.
  void validate() const;
};

AnglePotential free_potential();
/// coefficient * cos(theta): a heavy body with the field along the symmetry axis.
AnglePotential heavy_potential(double coefficient);

double pole_distance(double theta);

/// Mass matrix in the order (phi, theta, psi), from
///   w1 = psidot sin(theta) sin(phi) + thetadot cos(phi)
///   w2 = psidot sin(theta) cos(phi) - thetadot sin(phi)
///   w3 = psidot cos(theta) + phidot
Mat euler_mass_matrix(const RigidBodyParams& p, double phi, double theta);

/// n = 2 (phi, theta), k = 0, l = 1 (psi); pole guard min(theta, pi - theta).
SymmetricSystem rb_system(const RigidBodyParams& p);

/// psi-psi entry: (A sin^2 phi + B cos^2 phi) sin^2 theta + C cos^2 theta.
double precession_inertia(const RigidBodyParams& p, double phi, double theta);

/// Closed-form Routhian at zero momentum,
///   (Q thetadot^2 + R phidot^2 - 2 (A-B) C phidot thetadot sin phi cos phi sin theta cos theta)
///   / (2 * precession_inertia) - V0,
/// with Q = (A cos^2 phi + B sin^2 phi) C cos^2 theta + A B sin^2 theta and
///      R = (A sin^2 phi + B cos^2 phi) C sin^2 theta.
double kolosov_reduced_lagrangian(const RigidBodyParams& p, double phi, double theta,
                                  double phidot, double thetadot);

/// Precession rate that makes the axial momentum vanish.
double psi_dot_zero_momentum(const RigidBodyParams& p, double phi, double theta, double phidot,
                             double thetadot);

/// (1/T) * integral of psidot over a grid covering exactly one period.
double lambda_average(std::span<const double> times, std::span<const double> psidot, double T);

/// Largest gap between (phi, theta, psi - Lambda t) at t and at t + T, over
/// every grid time with t + T inside the trajectory. Angles compare mod 2pi.
double rotating_frame_residual(const Trajectory& full, double Lambda, double T);

struct RelativeOrbitConfig {
  int steps_per_period = 4000;  // RK4 steps per period, fixed so the flow is smooth in T
  ShootConfig shoot{};
};

/// A zero-momentum reduced orbit that closes after one period, together with
/// its reconstruction over two periods and the rotating-frame diagnostics.
struct RelativeOrbit {
  PeriodicOrbit reduced;
  Trajectory full;            // [0, 2T], psi unwrapped, psi(0) = 0
  double Lambda = 0.0;
  double endpoint_gap = 0.0;  // |psi(T) - psi(0) - Lambda T|
  double residual = 0.0;      // rotating_frame_residual over the second period
};

/// Refines guess by shooting (phi anchored, phi lifted by 2pi per period when
/// it winds) and reconstructs psi.
RelativeOrbit relative_orbit(const RigidBodyParams& p, const ReducedState& guess, double T_guess,
                             const RelativeOrbitConfig& cfg = {});

/// Lagrange top (A = B) in V0 = k cos(theta): steady precession at theta0
/// with thetadot = 0. Requires k cos(theta0) < 0.
ReducedState lagrange_top_steady(const RigidBodyParams& p, double k, double theta0);

}  // namespace routh::rigidbody
