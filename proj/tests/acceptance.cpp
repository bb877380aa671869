// Acceptance gate: one PASS/FAIL line per criterion.
#include "helpers.hpp"

#include "routh/ellipsoid.hpp"
#include "routh/errors.hpp"
#include "routh/integrate.hpp"
#include "routh/reduction.hpp"
#include "routh/rigidbody.hpp"

#include <cstdio>
#include <functional>
#include <numbers>
#include <string>

using namespace routh;
using namespace routh::testing;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool passed;
  std::string detail;
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

rigidbody::RigidBodyParams body(double A, double B, double C) {
  rigidbody::RigidBodyParams p;
  p.A = A;
  p.B = B;
  p.C = C;
  return p;
}

const ReducedState kStart{vec({0.4, 1.2}), vec({0.7, 0.3})};

Outcome momentum_round_trip() {
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<int> dim(0, 3);
  double worst = 0;
  for (int i = 0; i < 100; ++i) {
    const int n = 1 + dim(rng) % 3;
    int k = dim(rng), l = dim(rng);
    if (k + l == 0) l = 1;
    const auto sys = random_system(rng, n, k, l);
    const MomentumValue f{random_vec(rng, k, 3), random_vec(rng, l, 3)};
    const ReducedState r{random_vec(rng, n, 2), random_vec(rng, n, 2)};
    const Vec back = momentum_map(sys, complete_state(sys, f, r, Vec::Zero(k), Vec::Zero(l))).stacked();
    worst = std::max(worst, (back - f.stacked()).norm() / f.stacked().norm());
  }
  return {worst <= 1e-12, "max relative residual " + sci(worst) + " (tol 1e-12)"};
}

Outcome determinant_identity() {
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> u(-2, 2), th(0.2, kPi - 0.2);
  double worst = 0;
  const auto rb = rigidbody::rb_system(body(1, 2, 3));
  for (int i = 0; i < 50; ++i) {
    const ReducedState r{vec({u(rng), th(rng)}), vec({u(rng), u(rng)})};
    const auto [lhs, rhs] = symplectic_det_pair(rb, MomentumValue::zero(rb), r);
    worst = std::max(worst, std::abs(lhs - rhs) / std::abs(rhs));
  }
  for (int i = 0; i < 50; ++i) {
    const int n = 1 + i % 3, k = i % 2, l = 1 + i % 2;
    const auto sys = random_system(rng, n, k, l);
    const MomentumValue f{random_vec(rng, k), random_vec(rng, l)};
    const ReducedState r{random_vec(rng, n), random_vec(rng, n)};
    const auto [lhs, rhs] = symplectic_det_pair(sys, f, r);
    worst = std::max(worst, std::abs(lhs - rhs) / std::abs(rhs));
  }
  return {worst <= 1e-5, "max relative gap " + sci(worst) + " (tol 1e-5)"};
}

Outcome zero_momentum_degeneration() {
  std::mt19937_64 rng(303);
  double worst = 0;
  for (int i = 0; i < 100; ++i) {
    const auto sys = random_system(rng, 1 + i % 3, i % 2, 1);
    const MomentumValue f = MomentumValue::zero(sys);
    const ReducedState r{random_vec(rng, sys.n), random_vec(rng, sys.n)};
    const double l = lagrangian_full(sys, complete_state(sys, f, r, Vec::Zero(sys.k), Vec::Zero(1)));
    worst = std::max(worst, std::abs(routhian(sys, f, r) - l) / std::max(1.0, std::abs(l)));
  }
  auto p = body(1, 2, 3);
  p.potential = rigidbody::heavy_potential(0.7);
  const auto rb = rigidbody::rb_system(p);
  std::uniform_real_distribution<double> u(-2, 2), th(0.05, kPi - 0.05);
  double closed = 0;
  for (int i = 0; i < 100; ++i) {
    const ReducedState r{vec({u(rng), th(rng)}), vec({u(rng), u(rng)})};
    const double lr = routhian(rb, MomentumValue::zero(rb), r);
    const double lf = lagrangian_full(rb, complete_state(rb, MomentumValue::zero(rb), r, Vec(), vec({0})));
    worst = std::max(worst, std::abs(lr - lf) / std::max(1.0, std::abs(lf)));
    const double lk = rigidbody::kolosov_reduced_lagrangian(p, r.q[0], r.q[1], r.qdot[0], r.qdot[1]);
    closed = std::max(closed, std::abs(lk - lr) / std::max(1.0, std::abs(lr)));
  }
  return {worst <= 1e-12 && closed <= 1e-10,
          "routhian vs lagrangian " + sci(worst) + " (tol 1e-12), closed form " + sci(closed) +
              " (tol 1e-10)"};
}

Outcome projection_equivalence() {
  const auto sys = rigidbody::rb_system(body(1, 2, 3));
  const MomentumValue f = MomentumValue::zero(sys);
  const IntegratorConfig cfg{Method::Rk4Fixed, 1e-3};
  const Trajectory full = integrate_full(sys, complete_state(sys, f, kStart, Vec(), vec({0})), 0, 10, cfg);
  const Trajectory red = integrate_reduced(sys, f, kStart, 0, 10, cfg);
  const Trajectory rec = reconstruct(sys, f, red, Vec(), vec({0}));
  double gap = 0, psi = 0;
  for (std::size_t i = 0; i < red.size(); ++i) {
    const Vec& a = full.states[i];
    gap = std::max({gap, (a.head(2) - red.states[i].head(2)).cwiseAbs().maxCoeff(),
                    (a.segment(3, 2) - red.states[i].tail(2)).cwiseAbs().maxCoeff()});
    psi = std::max(psi, std::abs(rec.states[i][2] - a[2]));
  }
  return {gap <= 1e-6 && psi <= 1e-6,
          "projected gap " + sci(gap) + ", psi gap " + sci(psi) + " (tol 1e-6)"};
}

Outcome conservation() {
  const auto sys = rigidbody::rb_system(body(1, 2, 3));
  const MomentumValue f = MomentumValue::zero(sys);
  const IntegratorConfig cfg{Method::Rk4Fixed, 1e-3};
  const Trajectory red = integrate_reduced(sys, f, kStart, 0, 100, cfg);
  double de = 0;
  for (const Vec& s : red.states) {
    de = std::max(de, std::abs(reduced_energy(sys, f, ReducedState::from_vector(2, s)) - red.meta.energy0));
  }
  de /= std::abs(red.meta.energy0);
  const Trajectory full = integrate_full(sys, complete_state(sys, f, kStart, Vec(), vec({0})), 0, 50, cfg);
  double dj = 0;
  for (const Vec& s : full.states) {
    dj = std::max(dj, std::abs(momentum_map(sys, FullState::from_vector(sys, s)).eta[0]));
  }
  return {de <= 1e-6 && dj <= 1e-7,
          "energy drift " + sci(de) + " (tol 1e-6), momentum drift " + sci(dj) + " (tol 1e-7)"};
}

Outcome kolosov_equivalence() {
  const auto p = body(1, 2, 3);
  const IntegratorConfig cfg{Method::Rk4Fixed, 1e-3};
  double a = 0, b = 0, c = 0;
  auto take = [&](const ellipsoid::Equivalence& eq) {
    a = std::max(a, eq.energy_relation);
    b = std::max(b, eq.sup_distance);
    c = std::max(c, eq.speed_variation);
  };
  take(ellipsoid::kolosov_equivalence(p, kStart, 10.0, cfg));
  // Each closed section orbit over exactly one period, with h from its initial state.
  const auto cd = ellipsoid::make_conformal_data(p, 1.0);
  for (const auto plane : {ellipsoid::Section::X, ellipsoid::Section::Y, ellipsoid::Section::Z}) {
    const auto so = ellipsoid::section_orbit(p, cd, plane);
    const auto sr = ellipsoid::section_reduced_orbit(p, cd, so);
    take(ellipsoid::kolosov_equivalence(sr.params, sr.r0, sr.period, cfg));
  }
  return {a <= 1e-6 && b <= 1e-5 && c <= 1e-5,
          "energy relation " + sci(a) + " (tol 1e-6), sup distance " + sci(b) +
              " (tol 1e-5), dSigma-speed variation " + sci(c) + " (tol 1e-5)"};
}

Outcome closed_geodesics() {
  const auto p = body(1, 2, 3);
  const auto tri = ellipsoid::principal_section_orbits(p, ellipsoid::make_conformal_data(p, 1.0));
  double closure = 0;
  std::string periods;
  for (const auto& o : tri) {
    closure = std::max(closure, o.orbit.closure_error);
    periods += (periods.empty() ? "" : ", ") + std::to_string(o.orbit.period);
  }
  const auto s = body(1, 1, 1);
  const auto sph = ellipsoid::principal_section_orbits(s, ellipsoid::make_conformal_data(s, 0.5));
  double spread = 0;
  for (const auto& o : sph) {
    closure = std::max(closure, o.orbit.closure_error);
    spread = std::max(spread, std::abs(o.orbit.period - sph[0].orbit.period));
  }
  return {closure <= 1e-8 && spread <= 1e-8,
          "closure " + sci(closure) + " (tol 1e-8), sphere period spread " + sci(spread) +
              " (tol 1e-8), triaxial periods " + periods};
}

Outcome rotating_frame() {
  double gap = 0, residual = 0;
  int count = 0;
  auto take = [&](const rigidbody::RelativeOrbit& o) {
    gap = std::max(gap, o.endpoint_gap);
    residual = std::max(residual, o.residual);
    ++count;
  };
  const auto p = body(1, 2, 3);
  const auto cd = ellipsoid::make_conformal_data(p, 1.0);
  for (const auto plane : {ellipsoid::Section::X, ellipsoid::Section::Y, ellipsoid::Section::Z}) {
    const auto sr = ellipsoid::section_reduced_orbit(p, cd, ellipsoid::section_orbit(p, cd, plane));
    take(rigidbody::relative_orbit(sr.params, sr.r0, sr.period));
  }
  // Lagrange top steady precession: Lambda != 0.
  auto top = body(1, 1, 1.5);
  top.potential = rigidbody::heavy_potential(-0.8);
  top.potential_name = "heavy";
  const ReducedState r0 = rigidbody::lagrange_top_steady(top, -0.8, 1.0);
  const auto o = rigidbody::relative_orbit(top, r0, 2 * kPi / r0.qdot[0]);
  take(o);
  return {gap <= 1e-8 && residual <= 1e-6,
          std::to_string(count) + " orbits, endpoint gap " + sci(gap) + " (tol 1e-8), residual " +
              sci(residual) + " (tol 1e-6), top Lambda " + sci(o.Lambda)};
}

Outcome integrator_order() {
  const OdeRhs osc = [](double, const Vec& y) { return vec({y[1], -y[0]}); };
  auto err = [&](double dt) {
    return (integrate_ode(osc, vec({1, 0}), 0, 2 * kPi, {Method::Rk4Fixed, dt}).back() - vec({1, 0})).norm();
  };
  const double ratio = err(0.02) / err(0.01);
  return {ratio >= 12 && ratio <= 20, "error ratio " + std::to_string(ratio) + " (range [12, 20])"};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"momentum round-trip", momentum_round_trip},
      {"determinant identity", determinant_identity},
      {"zero-momentum degeneration", zero_momentum_degeneration},
      {"projection equivalence", projection_equivalence},
      {"conservation", conservation},
      {"ellipsoid equivalence", kolosov_equivalence},
      {"closed geodesics", closed_geodesics},
      {"rotating-frame periodicity", rotating_frame},
      {"integrator order", integrator_order},
  };
  int failed = 0, index = 0;
  for (const auto& [name, fn] : criteria) {
    ++index;
    Outcome o{false, ""};
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    std::printf("%s [%d] %s: %s\n", o.passed ? "PASS" : "FAIL", index, name, o.detail.c_str());
    std::fflush(stdout);
    failed += o.passed ? 0 : 1;
  }
  std::printf("%d/%d criteria passed\n", index - failed, index);
  return failed == 0 ? 0 : 1;
}
