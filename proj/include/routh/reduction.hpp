#pragma once

#include "routh/system.hpp"

#include <utility>

namespace routh {

struct MassBlocks {
  Mat full;  // ||K_ij||
  Mat Kqq;   // n x n
  Mat Kqc;   // n x (k+l)
  Mat D;     // (k+l) x (k+l), cyclic-cyclic block
};

/// Evaluates and partitions the mass matrix at q.
/// Throws ChartBoundary within kChartBoundaryTol of the chart edge and
/// NotPositiveDefinite if the matrix is asymmetric or fails Cholesky.
MassBlocks mass_matrix_blocks(const SymmetricSystem& sys, const Vec& q);

/// Momentum integral in coordinates: rows n.. of K applied to the velocity.
MomentumValue momentum_map(const SymmetricSystem& sys, const FullState& s);

/// Unique cyclic velocities with momentum f: D (xdot, psidot) = f - Kcq qdot.
CyclicVelocities solve_cyclic(const SymmetricSystem& sys, const Vec& q, const Vec& qdot,
                              const MomentumValue& f);

/// Completes a reduced state to the full state lying in J^{-1}(f).
FullState complete_state(const SymmetricSystem& sys, const MomentumValue& f,
                         const ReducedState& r, const Vec& x, const Vec& psi);

double lagrangian_full(const SymmetricSystem& sys, const FullState& s);

/// Local Routhian L_bar - xi.xdot - eta.psidot. Equals L_bar when f = 0.
double routhian(const SymmetricSystem& sys, const MomentumValue& f, const ReducedState& r);

/// Energy K + V at the completed state.
double reduced_energy(const SymmetricSystem& sys, const MomentumValue& f, const ReducedState& r);

/// Schur complement Kqq - Kqc D^{-1} Kcq, the qdot-Hessian of the Routhian.
Mat reduced_mass_matrix(const SymmetricSystem& sys, const Vec& q);

/// Routhian momentum dL/dqdot = Kqq qdot + Kqc c(q, qdot). Exact, since the
/// cyclic terms cancel on the momentum level set.
Vec routhian_momentum(const SymmetricSystem& sys, const MomentumValue& f, const ReducedState& r);

struct ReducedRhs {
  Vec qdot;
  Vec qddot;
};

/// Euler-Lagrange field of the Routhian. The first block is the input qdot.
ReducedRhs reduced_rhs(const SymmetricSystem& sys, const MomentumValue& f, const ReducedState& r);

/// (det of the 2n x 2n matrix of delta q ^ delta L_qdot, (det K / det D)^2).
std::pair<double, double> symplectic_det_pair(const SymmetricSystem& sys, const MomentumValue& f,
                                              const ReducedState& r);

/// Central-difference step used for all Routhian derivatives.
inline double fd_step(double value) {
  const double a = value < 0 ? -value : value;
  return a > 1.0 ? 1e-6 * a : 1e-6;
}

}  // namespace routh
