#include "routh/integrate.hpp"

#include "routh/errors.hpp"
#include "routh/reduction.hpp"

#include <algorithm>
#include <cmath>

namespace routh {

void IntegratorConfig::validate() const {
  if (!(dt > 0) || !std::isfinite(dt)) throw Error(ErrorKind::InvalidParams, "dt must be > 0");
  if (!(abs_tol > 0) || !(rel_tol > 0)) {
    throw Error(ErrorKind::InvalidParams, "tolerances must be > 0");
  }
  if (max_steps < 1) throw Error(ErrorKind::InvalidParams, "max_steps must be >= 1");
}

void Trajectory::validate() const {
  if (times.size() != states.size() || times.size() < 2) {
    throw Error(ErrorKind::GridMismatch, "trajectory needs matching times and states, at least two");
  }
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) {
      throw Error(ErrorKind::GridMismatch, "trajectory times are not strictly increasing");
    }
  }
}

namespace {

Vec rk4_step(const OdeRhs& rhs, double t, const Vec& y, double h) {
  const Vec k1 = rhs(t, y);
  const Vec k2 = rhs(t + 0.5 * h, y + 0.5 * h * k1);
  const Vec k3 = rhs(t + 0.5 * h, y + 0.5 * h * k2);
  const Vec k4 = rhs(t + h, y + h * k3);
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

void check_finite(const Vec& y, double t) {
  if (!y.allFinite()) {
    throw Error(ErrorKind::StepFailure, "non-finite state at t=" + std::to_string(t));
  }
}

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

template <typename Sink>
void run(const OdeRhs& rhs, const Vec& s0, double t0, double t1, const IntegratorConfig& cfg,
         const StepProjection& project, Sink&& sink) {
  cfg.validate();
  if (!(t1 > t0)) throw Error(ErrorKind::InvalidParams, "t1 must exceed t0");
  Vec y = s0;
  check_finite(rhs(t0, y), t0);
  sink(t0, y);

  if (cfg.method == Method::Rk4Fixed) {
    const double span = t1 - t0;
    const long steps = std::max(1L, static_cast<long>(std::ceil(span / cfg.dt * (1 - 1e-12))));
    if (steps > cfg.max_steps) throw Error(ErrorKind::MaxStepsExceeded, "fixed-step count exceeds max_steps");
    const double h = span / static_cast<double>(steps);
    for (long i = 0; i < steps; ++i) {
      const double t = t0 + static_cast<double>(i) * h;
      y = rk4_step(rhs, t, y, h);
      if (project) project(y);
      check_finite(y, t + h);
      sink(i + 1 == steps ? t1 : t0 + static_cast<double>(i + 1) * h, y);
    }
    return;
  }

  double t = t0;
  double h = std::min(cfg.dt, t1 - t0);
  Vec k1 = rhs(t, y);
  long steps = 0;
  while (t < t1) {
    if (++steps > cfg.max_steps) throw Error(ErrorKind::MaxStepsExceeded, "adaptive integration exceeded max_steps");
    if (h < 1e-14 * std::max(1.0, std::abs(t))) {
      throw Error(ErrorKind::StepFailure, "step size underflow at t=" + std::to_string(t));
    }
    const bool last = t + h >= t1;
    if (last) h = t1 - t;
    const Vec k2 = rhs(t + c2 * h, y + h * (a21 * k1));
    const Vec k3 = rhs(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
    const Vec k4 = rhs(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const Vec k5 = rhs(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const Vec k6 = rhs(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    Vec ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const Vec k7 = rhs(t + h, ynew);
    const Vec err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    double norm = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      const double sc = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      norm = std::max(norm, std::abs(err[i]) / sc);
    }
    if (!std::isfinite(norm)) norm = 1e10;
    if (norm <= 1.0) {
      t = last ? t1 : t + h;
      if (project) project(ynew);
      check_finite(ynew, t);
      y = std::move(ynew);
      k1 = project ? rhs(t, y) : k7;
      sink(t, y);
    }
    const double factor = norm == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(norm, -0.2), 0.2, 5.0);
    h *= factor;
  }
}

}  // namespace

Trajectory integrate_ode(const OdeRhs& rhs, const Vec& s0, double t0, double t1,
                         const IntegratorConfig& cfg, const StepProjection& project) {
  Trajectory out;
  run(rhs, s0, t0, t1, cfg, project, [&](double t, const Vec& y) {
    out.times.push_back(t);
    out.states.push_back(y);
  });
  return out;
}

Trajectory integrate_on_grid(const OdeRhs& rhs, const Vec& s0, std::span<const double> grid,
                             const StepProjection& project) {
  if (grid.size() < 2) throw Error(ErrorKind::GridMismatch, "grid needs at least two nodes");
  Trajectory out;
  out.times.assign(grid.begin(), grid.end());
  out.states.reserve(grid.size());
  Vec y = s0;
  out.states.push_back(y);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double h = grid[i] - grid[i - 1];
    if (!(h > 0)) throw Error(ErrorKind::GridMismatch, "grid is not strictly increasing");
    y = rk4_step(rhs, grid[i - 1], y, h);
    if (project) project(y);
    check_finite(y, grid[i]);
    out.states.push_back(y);
  }
  return out;
}

Vec flow_to(const OdeRhs& rhs, const Vec& s0, double t0, double t1, const IntegratorConfig& cfg,
            const StepProjection& project) {
  Vec last = s0;
  run(rhs, s0, t0, t1, cfg, project, [&](double, const Vec& y) { last = y; });
  return last;
}

Vec full_rhs(const SymmetricSystem& sys, const Vec& state) {
  const int n = sys.n;
  const int d = sys.dim();
  const Vec q = state.head(n);
  const Vec v = state.tail(d);
  const MassBlocks b = mass_matrix_blocks(sys, q);

  // Only the shape coordinates carry forces; cyclic partials vanish.
  Vec force = Vec::Zero(d);
  Vec kdot_v = Vec::Zero(d);
  Vec probe = q;
  for (int i = 0; i < n; ++i) {
    const double h = fd_step(q[i]);
    probe[i] = q[i] + h;
    const Mat kp = sys.mass_matrix(probe);
    const double vp = sys.potential(probe);
    probe[i] = q[i] - h;
    const Mat km = sys.mass_matrix(probe);
    const double vm = sys.potential(probe);
    probe[i] = q[i];
    const Mat dk = (kp - km) / (2 * h);
    force[i] = 0.5 * v.dot(dk * v) - (vp - vm) / (2 * h);
    kdot_v += v[i] * (dk * v);
  }
  Vec out(2 * d);
  out << v, b.full.llt().solve(force - kdot_v);
  return out;
}

Trajectory integrate_full(const SymmetricSystem& sys, const FullState& s0, double t0, double t1,
                          const IntegratorConfig& cfg) {
  const OdeRhs rhs = [&sys](double, const Vec& y) { return full_rhs(sys, y); };
  Trajectory out = integrate_ode(rhs, s0.to_vector(), t0, t1, cfg);
  out.meta.system_id = sys.id;
  out.meta.chart_id = sys.chart;
  out.meta.momentum = momentum_map(sys, s0);
  const Vec v = s0.velocity();
  out.meta.energy0 = 0.5 * v.dot(mass_matrix_blocks(sys, s0.q).full * v) + sys.potential(s0.q);
  return out;
}

Trajectory integrate_reduced(const SymmetricSystem& sys, const MomentumValue& f,
                             const ReducedState& r0, double t0, double t1,
                             const IntegratorConfig& cfg) {
  check_momentum(sys, f);
  const int n = sys.n;
  const OdeRhs rhs = [&sys, &f, n](double, const Vec& y) {
    const ReducedRhs r = reduced_rhs(sys, f, ReducedState::from_vector(n, y));
    Vec out(2 * n);
    out << r.qdot, r.qddot;
    return out;
  };
  Trajectory out = integrate_ode(rhs, r0.to_vector(), t0, t1, cfg);
  out.meta.system_id = sys.id;
  out.meta.chart_id = sys.chart;
  out.meta.momentum = f;
  out.meta.energy0 = reduced_energy(sys, f, r0);
  return out;
}

Trajectory reconstruct(const SymmetricSystem& sys, const MomentumValue& f, const Trajectory& red,
                       const Vec& x0, const Vec& psi0) {
  check_momentum(sys, f);
  if (!red.meta.momentum || !(*red.meta.momentum == f)) {
    throw Error(ErrorKind::MomentumMismatch,
                "reduced trajectory was generated with a different momentum value");
  }
  red.validate();
  if (x0.size() != sys.k || psi0.size() != sys.l) {
    throw Error(ErrorKind::InvalidParams, "initial cyclic coordinates have wrong length");
  }
  const int n = sys.n;
  const int c = sys.cyclic_dim();
  const std::size_t m = red.size();

  std::vector<Vec> cyc(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (red.states[i].size() != 2 * n) {
      throw Error(ErrorKind::GridMismatch, "reduced state has wrong length");
    }
    cyc[i] = solve_cyclic(sys, red.states[i].head(n), red.states[i].tail(n), f).stacked();
  }
  Vec start(c);
  start << x0, psi0;
  std::vector<Vec> pos(m, start);
  std::vector<double> samples(m);
  for (int j = 0; j < c; ++j) {
    for (std::size_t i = 0; i < m; ++i) samples[i] = cyc[i][j];
    const auto integral = cumulative_simpson(red.times, samples);
    for (std::size_t i = 0; i < m; ++i) pos[i][j] += integral[i];
  }

  Trajectory out;
  out.times = red.times;
  out.meta = red.meta;
  out.states.reserve(m);
  const int d = sys.dim();
  for (std::size_t i = 0; i < m; ++i) {
    Vec s(2 * d);
    s << red.states[i].head(n), pos[i], red.states[i].tail(n), cyc[i];
    out.states.push_back(std::move(s));
  }
  return out;
}

Trajectory reparametrize_time(const Trajectory& traj, const TimeFactor& factor) {
  traj.validate();
  std::vector<double> inv(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double a = factor(traj.states[i]);
    if (!(a > 0) || !std::isfinite(a)) {
      throw Error(ErrorKind::NonPositiveFactor, "time-change factor must be positive");
    }
    inv[i] = 1.0 / a;
  }
  const auto tau = cumulative_simpson(traj.times, inv);
  Trajectory out = traj;
  for (std::size_t i = 0; i < traj.size(); ++i) out.times[i] = traj.times.front() + tau[i];
  out.validate();
  return out;
}

PeriodicOrbit shoot_periodic(const FlowMap& flow, const Vec& guess, double T_guess,
                             const ShootConfig& cfg) {
  const Eigen::Index d = guess.size();
  if (cfg.phase_index < 0 || cfg.phase_index >= d) {
    throw Error(ErrorKind::InvalidParams, "phase index out of range");
  }
  if (!(T_guess > 0)) throw Error(ErrorKind::InvalidParams, "period guess must be > 0");
  const Vec lift = cfg.lift.size() == 0 ? Vec::Zero(d) : cfg.lift;
  if (lift.size() != d) throw Error(ErrorKind::InvalidParams, "lift has wrong length");

  // Unknowns: every state component except the anchored one, then T.
  auto unpack = [&](const Vec& z) {
    Vec s = guess;
    for (Eigen::Index i = 0, j = 0; i < d; ++i) {
      if (i != cfg.phase_index) s[i] = z[j++];
    }
    if (cfg.project) cfg.project(s);
    return s;
  };
  auto residual = [&](const Vec& z) -> Vec {
    const Vec s = unpack(z);
    return flow(s, z[d - 1]) - s - lift;
  };

  Vec z(d);
  for (Eigen::Index i = 0, j = 0; i < d; ++i) {
    if (i != cfg.phase_index) z[j++] = guess[i];
  }
  z[d - 1] = T_guess;

  Vec r = residual(z);
  double err = r.cwiseAbs().maxCoeff();
  int iter = 0;
  for (; iter < cfg.max_iter && err > 1e-2 * cfg.closure_tol; ++iter) {
    Mat jac(d, d);
    for (Eigen::Index j = 0; j < d; ++j) {
      const double h = cfg.fd_step * std::max(1.0, std::abs(z[j]));
      Vec zp = z, zm = z;
      zp[j] += h;
      zm[j] -= h;
      jac.col(j) = (residual(zp) - residual(zm)) / (2 * h);
    }
    Eigen::CompleteOrthogonalDecomposition<Mat> cod(jac);
    cod.setThreshold(1e-9);
    const Vec step = cod.solve(-r);

    double lambda = 1.0;
    bool improved = false;
    for (int ls = 0; ls < 8; ++ls, lambda *= 0.5) {
      Vec trial = z + lambda * step;
      if (!(trial[d - 1] > 0)) continue;
      Vec rt;
      try {
        rt = residual(trial);
      } catch (const Error&) {
        continue;  // trial left the domain of the flow
      }
      const double et = rt.cwiseAbs().maxCoeff();
      if (et < err) {
        z = std::move(trial);
        r = std::move(rt);
        err = et;
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
  if (!(err <= cfg.closure_tol)) {
    throw Error(ErrorKind::NoConvergence,
                "shooting stalled with closure error " + std::to_string(err));
  }
  return {unpack(z), z[d - 1], err, iter};
}

Vec hermite_positions(const Trajectory& traj, double t, int m) {
  const auto& ts = traj.times;
  if (t < ts.front() - 1e-12 || t > ts.back() + 1e-12) {
    throw Error(ErrorKind::SpanTooShort, "interpolation time outside the trajectory");
  }
  auto it = std::upper_bound(ts.begin(), ts.end(), t);
  std::size_t i1 = static_cast<std::size_t>(std::distance(ts.begin(), it));
  i1 = std::clamp<std::size_t>(i1, 1, ts.size() - 1);
  const std::size_t i0 = i1 - 1;
  const double h = ts[i1] - ts[i0];
  const double s = (t - ts[i0]) / h;
  const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
  const double h10 = s * (1 - s) * (1 - s);
  const double h01 = s * s * (3 - 2 * s);
  const double h11 = s * s * (s - 1);
  const Vec& y0 = traj.states[i0];
  const Vec& y1 = traj.states[i1];
  return h00 * y0.head(m) + h10 * h * y0.segment(m, m) + h01 * y1.head(m) +
         h11 * h * y1.segment(m, m);
}

}  // namespace routh
