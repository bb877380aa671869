#pragma once

#include "routh/system.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace routh {

enum class Method { Rk4Fixed, Rk45Adaptive };

struct IntegratorConfig {
  Method method = Method::Rk4Fixed;
  double dt = 1e-3;  // fixed step, or initial step for the adaptive method
  double abs_tol = 1e-12;
  double rel_tol = 1e-12;
  long max_steps = 10'000'000;

  void validate() const;
};

struct TrajectoryMeta {
  std::string system_id = "custom";
  std::string chart_id = "default";
  std::optional<MomentumValue> momentum;
  double energy0 = 0.0;
};

/// Sampled curve. States are stored with angles unwrapped (continuous lift).
struct Trajectory {
  std::vector<double> times;
  std::vector<Vec> states;
  TrajectoryMeta meta;

  std::size_t size() const { return times.size(); }
  const Vec& front() const { return states.front(); }
  const Vec& back() const { return states.back(); }
  /// Throws GridMismatch unless |times| = |states| >= 2 and times increase.
  void validate() const;
};

using OdeRhs = std::function<Vec(double t, const Vec& state)>;
/// Applied to every accepted state, e.g. to project back onto a constraint.
using StepProjection = std::function<void(Vec& state)>;

Trajectory integrate_ode(const OdeRhs& rhs, const Vec& s0, double t0, double t1,
                         const IntegratorConfig& cfg, const StepProjection& project = {});

/// RK4 through the given nodes, one step per interval.
Trajectory integrate_on_grid(const OdeRhs& rhs, const Vec& s0, std::span<const double> grid,
                             const StepProjection& project = {});

/// End state only; no samples are stored.
Vec flow_to(const OdeRhs& rhs, const Vec& s0, double t0, double t1, const IntegratorConfig& cfg,
            const StepProjection& project = {});

/// Euler-Lagrange equations in all n+k+l coordinates. State layout is
/// FullState::to_vector with psi unwrapped.
Vec full_rhs(const SymmetricSystem& sys, const Vec& state);

Trajectory integrate_full(const SymmetricSystem& sys, const FullState& s0, double t0, double t1,
                          const IntegratorConfig& cfg);

Trajectory integrate_reduced(const SymmetricSystem& sys, const MomentumValue& f,
                             const ReducedState& r0, double t0, double t1,
                             const IntegratorConfig& cfg);

/// Recovers x and psi by quadrature of the solved cyclic velocities.
/// Throws MomentumMismatch if red was produced at another momentum value.
Trajectory reconstruct(const SymmetricSystem& sys, const MomentumValue& f, const Trajectory& red,
                       const Vec& x0, const Vec& psi0);

using TimeFactor = std::function<double(const Vec& state)>;

/// Same states on the grid tau(t) = int dt / factor(state).
Trajectory reparametrize_time(const Trajectory& traj, const TimeFactor& factor);

// Quadrature on an arbitrary increasing grid, exact for quadratics.
std::vector<double> cumulative_simpson(std::span<const double> t, std::span<const double> f);
double simpson(std::span<const double> t, std::span<const double> f);

struct PeriodicOrbit {
  Vec initial_state;
  double period = 0.0;
  double closure_error = 0.0;
  int iterations = 0;
};

/// flow(state, T) -> state at time T.
using FlowMap = std::function<Vec(const Vec& state, double T)>;

struct ShootConfig {
  double closure_tol = 1e-8;
  int max_iter = 40;
  double fd_step = 1e-7;
  int phase_index = 0;  // coordinate held at its initial value
  // Expected flow(s, T) - s on the orbit, e.g. 2pi in an angle that winds once.
  Vec lift;
  // Applied to every candidate state before flowing it.
  StepProjection project;
};

/// Newton on (state, T) -> flow(state, T) - state - lift with one coordinate fixed.
PeriodicOrbit shoot_periodic(const FlowMap& flow, const Vec& guess, double T_guess,
                             const ShootConfig& cfg = {});

/// Cubic Hermite value of the first m components at time t, using the
/// trailing m components as their derivatives.
Vec hermite_positions(const Trajectory& traj, double t, int m);

}  // namespace routh
