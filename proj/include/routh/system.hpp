#pragma once

#include <Eigen/Dense>

#include <functional>
#include <numbers>
#include <string>

namespace routh {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Distance below which a pole guard reports the chart boundary.
inline constexpr double kChartBoundaryTol = 1e-6;

/// A mechanical system with abelian symmetry R^k x T^l written in one special
/// chart (q, x, psi). The mass matrix and potential see the shape coordinates
/// q only, so x and psi are cyclic by construction.
struct SymmetricSystem {
  int n = 0;  // shape coordinates q
  int k = 0;  // translational cyclic coordinates x
  int l = 0;  // angular cyclic coordinates psi

  std::function<Mat(const Vec&)> mass_matrix;
  std::function<double(const Vec&)> potential;
  // Optional: distance from q to the edge of the chart.
  std::function<double(const Vec&)> pole_guard;

  std::string id = "custom";
  std::string chart = "default";

  int dim() const { return n + k + l; }
  int cyclic_dim() const { return k + l; }
};

/// Fixed value (xi, eta) of the momentum integral.
struct MomentumValue {
  Vec xi;   // R^k
  Vec eta;  // R^l

  static MomentumValue zero(const SymmetricSystem& sys) {
    return {Vec::Zero(sys.k), Vec::Zero(sys.l)};
  }
  static MomentumValue from_stacked(const SymmetricSystem& sys, const Vec& stacked);

  Vec stacked() const;
  bool operator==(const MomentumValue& other) const;
};

struct CyclicVelocities {
  Vec xdot;
  Vec psidot;

  Vec stacked() const;
};

struct ReducedState {
  Vec q;
  Vec qdot;

  Vec to_vector() const;
  static ReducedState from_vector(int n, const Vec& v);
};

/// Point of TM in special coordinates. psi is stored reduced to [0, 2pi).
struct FullState {
  Vec q, x, psi;
  Vec qdot, xdot, psidot;

  /// Layout (q, x, psi, qdot, xdot, psidot).
  Vec to_vector() const;
  /// Reads the same layout; psi is wrapped into [0, 2pi).
  static FullState from_vector(const SymmetricSystem& sys, const Vec& v);

  /// Full velocity vector (qdot, xdot, psidot).
  Vec velocity() const;
};

double wrap_angle(double a);

/// Throws InvalidParams unless the dimensions of f match sys.
void check_momentum(const SymmetricSystem& sys, const MomentumValue& f);

}  // namespace routh
