#include "routh/reduction.hpp"

#include "routh/errors.hpp"

#include <cmath>

namespace routh {

namespace {

void check_chart(const SymmetricSystem& sys, const Vec& q) {
  if (q.size() != sys.n) {
    throw Error(ErrorKind::InvalidParams, "shape coordinate vector has wrong length");
  }
  if (!q.allFinite()) {
    throw Error(ErrorKind::ChartBoundary, "non-finite shape coordinates");
  }
  if (sys.pole_guard && sys.pole_guard(q) < kChartBoundaryTol) {
    throw Error(ErrorKind::ChartBoundary, "state within 1e-6 of the chart boundary");
  }
}

// D (xdot, psidot) = f - Kcq qdot, with D already factored.
Vec cyclic_solve(const MassBlocks& b, const Vec& qdot, const MomentumValue& f) {
  const Vec rhs = f.stacked() - b.Kqc.transpose() * qdot;
  return b.D.llt().solve(rhs);
}

Vec completed_velocity(const MassBlocks& b, const Vec& qdot, const MomentumValue& f) {
  Vec v(qdot.size() + b.D.rows());
  v << qdot, cyclic_solve(b, qdot, f);
  return v;
}

}  // namespace

MassBlocks mass_matrix_blocks(const SymmetricSystem& sys, const Vec& q) {
  check_chart(sys, q);
  MassBlocks b;
  b.full = sys.mass_matrix(q);
  const int d = sys.dim();
  if (b.full.rows() != d || b.full.cols() != d) {
    throw Error(ErrorKind::InvalidParams, "mass matrix has wrong shape");
  }
  if (!b.full.allFinite()) {
    throw Error(ErrorKind::NotPositiveDefinite, "mass matrix has non-finite entries");
  }
  const double scale = b.full.cwiseAbs().maxCoeff();
  const double asym = (b.full - b.full.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * scale) {
    throw Error(ErrorKind::NotPositiveDefinite, "mass matrix is not symmetric");
  }
  Eigen::LLT<Mat> llt(b.full);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorKind::NotPositiveDefinite, "Cholesky factorization of the mass matrix failed");
  }
  const int n = sys.n;
  const int c = sys.cyclic_dim();
  b.Kqq = b.full.topLeftCorner(n, n);
  b.Kqc = b.full.topRightCorner(n, c);
  b.D = b.full.bottomRightCorner(c, c);
  return b;
}

MomentumValue momentum_map(const SymmetricSystem& sys, const FullState& s) {
  const MassBlocks b = mass_matrix_blocks(sys, s.q);
  const Vec v = s.velocity();
  const Vec j = b.full.bottomRows(sys.cyclic_dim()) * v;
  return MomentumValue::from_stacked(sys, j);
}

CyclicVelocities solve_cyclic(const SymmetricSystem& sys, const Vec& q, const Vec& qdot,
                              const MomentumValue& f) {
  check_momentum(sys, f);
  const MassBlocks b = mass_matrix_blocks(sys, q);
  const Vec c = cyclic_solve(b, qdot, f);
  return {c.head(sys.k), c.tail(sys.l)};
}

FullState complete_state(const SymmetricSystem& sys, const MomentumValue& f,
                         const ReducedState& r, const Vec& x, const Vec& psi) {
  const CyclicVelocities c = solve_cyclic(sys, r.q, r.qdot, f);
  FullState s{r.q, x, psi, r.qdot, c.xdot, c.psidot};
  for (auto& a : s.psi) a = wrap_angle(a);
  return s;
}

double lagrangian_full(const SymmetricSystem& sys, const FullState& s) {
  const MassBlocks b = mass_matrix_blocks(sys, s.q);
  const Vec v = s.velocity();
  return 0.5 * v.dot(b.full * v) - sys.potential(s.q);
}

double routhian(const SymmetricSystem& sys, const MomentumValue& f, const ReducedState& r) {
  check_momentum(sys, f);
  const MassBlocks b = mass_matrix_blocks(sys, r.q);
  const Vec v = completed_velocity(b, r.qdot, f);
  const double lbar = 0.5 * v.dot(b.full * v) - sys.potential(r.q);
  return lbar - f.stacked().dot(v.tail(sys.cyclic_dim()));
}

double reduced_energy(const SymmetricSystem& sys, const MomentumValue& f, const ReducedState& r) {
  check_momentum(sys, f);
  const MassBlocks b = mass_matrix_blocks(sys, r.q);
  const Vec v = completed_velocity(b, r.qdot, f);
  return 0.5 * v.dot(b.full * v) + sys.potential(r.q);
}

Mat reduced_mass_matrix(const SymmetricSystem& sys, const Vec& q) {
  const MassBlocks b = mass_matrix_blocks(sys, q);
  if (sys.cyclic_dim() == 0) return b.Kqq;
  return b.Kqq - b.Kqc * b.D.llt().solve(b.Kqc.transpose());
}

Vec routhian_momentum(const SymmetricSystem& sys, const MomentumValue& f, const ReducedState& r) {
  check_momentum(sys, f);
  const MassBlocks b = mass_matrix_blocks(sys, r.q);
  const Vec v = completed_velocity(b, r.qdot, f);
  return b.full.topRows(sys.n) * v;
}

ReducedRhs reduced_rhs(const SymmetricSystem& sys, const MomentumValue& f, const ReducedState& r) {
  const int n = sys.n;
  Vec dldq(n);
  Mat dpdq(n, n);
  ReducedState probe = r;
  for (int i = 0; i < n; ++i) {
    const double h = fd_step(r.q[i]);
    probe.q[i] = r.q[i] + h;
    const double lp = routhian(sys, f, probe);
    const Vec pp = routhian_momentum(sys, f, probe);
    probe.q[i] = r.q[i] - h;
    const double lm = routhian(sys, f, probe);
    const Vec pm = routhian_momentum(sys, f, probe);
    probe.q[i] = r.q[i];
    dldq[i] = (lp - lm) / (2 * h);
    dpdq.col(i) = (pp - pm) / (2 * h);
  }
  const Mat m = reduced_mass_matrix(sys, r.q);
  Eigen::LLT<Mat> llt(m);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorKind::SingularReducedMass, "reduced mass matrix is not positive definite");
  }
  Vec qddot = llt.solve(dldq - dpdq * r.qdot);
  if (!qddot.allFinite()) {
    throw Error(ErrorKind::SingularReducedMass, "reduced acceleration is not finite");
  }
  return {r.qdot, std::move(qddot)};
}

std::pair<double, double> symplectic_det_pair(const SymmetricSystem& sys, const MomentumValue& f,
                                              const ReducedState& r) {
  check_momentum(sys, f);
  const int n = sys.n;
  const MassBlocks b = mass_matrix_blocks(sys, r.q);
  const Vec v = completed_velocity(b, r.qdot, f);

  // L_qdot restricted to J_f, differentiated with the constrained rules:
  //   d/dq^j    = [dK/dq^j v]_q + Kqc dc/dq^j
  //   d/dqdot^j = Kqq e_j       + Kqc dc/dqdot^j
  Mat dpdq(n, n);
  Mat dpdqdot(n, n);
  for (int j = 0; j < n; ++j) {
    const double h = fd_step(r.q[j]);
    Vec qp = r.q, qm = r.q;
    qp[j] += h;
    qm[j] -= h;
    const Mat dk = (sys.mass_matrix(qp) - sys.mass_matrix(qm)) / (2 * h);
    const Vec dc = (solve_cyclic(sys, qp, r.qdot, f).stacked() -
                    solve_cyclic(sys, qm, r.qdot, f).stacked()) /
                   (2 * h);
    dpdq.col(j) = (dk * v).head(n) + b.Kqc * dc;

    const double hv = fd_step(r.qdot[j]);
    Vec vp = r.qdot, vm = r.qdot;
    vp[j] += hv;
    vm[j] -= hv;
    const Vec dcv = (solve_cyclic(sys, r.q, vp, f).stacked() -
                     solve_cyclic(sys, r.q, vm, f).stacked()) /
                    (2 * hv);
    dpdqdot.col(j) = b.Kqq.col(j) + b.Kqc * dcv;
  }

  Mat omega = Mat::Zero(2 * n, 2 * n);
  omega.topLeftCorner(n, n) = dpdq - dpdq.transpose();
  omega.topRightCorner(n, n) = dpdqdot;
  omega.bottomLeftCorner(n, n) = -dpdqdot.transpose();
  const double lhs = omega.partialPivLu().determinant();

  const double det_k = b.full.determinant();
  const double det_d = sys.cyclic_dim() == 0 ? 1.0 : b.D.determinant();
  const double ratio = det_k / det_d;
  return {lhs, ratio * ratio};
}

}  // namespace routh
