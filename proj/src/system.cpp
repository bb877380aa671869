#include "routh/system.hpp"

#include "routh/errors.hpp"

#include <cmath>

namespace routh {

MomentumValue MomentumValue::from_stacked(const SymmetricSystem& sys, const Vec& stacked) {
  if (stacked.size() != sys.cyclic_dim()) {
    throw Error(ErrorKind::InvalidParams, "momentum vector has wrong length");
  }
  return {stacked.head(sys.k), stacked.tail(sys.l)};
}

Vec MomentumValue::stacked() const {
  Vec out(xi.size() + eta.size());
  out << xi, eta;
  return out;
}

bool MomentumValue::operator==(const MomentumValue& other) const {
  return xi.size() == other.xi.size() && eta.size() == other.eta.size() &&
         xi == other.xi && eta == other.eta;
}

Vec CyclicVelocities::stacked() const {
  Vec out(xdot.size() + psidot.size());
  out << xdot, psidot;
  return out;
}

Vec ReducedState::to_vector() const {
  Vec out(q.size() + qdot.size());
  out << q, qdot;
  return out;
}

ReducedState ReducedState::from_vector(int n, const Vec& v) {
  return {v.head(n), v.segment(n, n)};
}

Vec FullState::to_vector() const {
  const auto d = q.size() + x.size() + psi.size();
  Vec out(2 * d);
  out << q, x, psi, qdot, xdot, psidot;
  return out;
}

FullState FullState::from_vector(const SymmetricSystem& sys, const Vec& v) {
  const int d = sys.dim();
  if (v.size() != 2 * d) {
    throw Error(ErrorKind::InvalidParams, "full state vector has wrong length");
  }
  FullState s;
  s.q = v.segment(0, sys.n);
  s.x = v.segment(sys.n, sys.k);
  s.psi = v.segment(sys.n + sys.k, sys.l);
  s.qdot = v.segment(d, sys.n);
  s.xdot = v.segment(d + sys.n, sys.k);
  s.psidot = v.segment(d + sys.n + sys.k, sys.l);
  for (auto& a : s.psi) a = wrap_angle(a);
  return s;
}

Vec FullState::velocity() const {
  Vec out(qdot.size() + xdot.size() + psidot.size());
  out << qdot, xdot, psidot;
  return out;
}

double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::fmod(a, two_pi);
  if (r < 0) r += two_pi;
  // fmod of a tiny negative number can round up to exactly 2pi
  if (r >= two_pi) r = 0.0;
  return r;
}

void check_momentum(const SymmetricSystem& sys, const MomentumValue& f) {
  if (f.xi.size() != sys.k || f.eta.size() != sys.l) {
    throw Error(ErrorKind::InvalidParams, "momentum dimensions do not match the system");
  }
  if (!f.xi.allFinite() || !f.eta.allFinite()) {
    throw Error(ErrorKind::InvalidParams, "momentum has non-finite entries");
  }
}

}  // namespace routh
