#pragma once

#include "routh/system.hpp"

#include <cmath>
#include <random>

namespace routh::testing {

inline Mat random_spd(std::mt19937_64& rng, int d) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Mat a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = u(rng);
  Mat k = a * a.transpose() + 0.5 * Mat::Identity(d, d);
  return 0.5 * (k + k.transpose());
}

/// K(q) = L(q) L(q)^T + I with smooth entries; V(q) = sum cos(q_i) + q.q / 4.
inline SymmetricSystem random_system(std::mt19937_64& rng, int n, int k, int l) {
  const int d = n + k + l;
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Mat a(d, d), b(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      a(i, j) = u(rng);
      b(i, j) = 0.5 * u(rng);
    }
  SymmetricSystem sys;
  sys.n = n;
  sys.k = k;
  sys.l = l;
  sys.mass_matrix = [a, b, n, d](const Vec& q) {
    Mat lq = a;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) lq(i, j) += b(i, j) * std::sin(q[(i + j) % n] + i);
    Mat m = lq * lq.transpose() + Mat::Identity(d, d);
    return Mat(0.5 * (m + m.transpose()));
  };
  sys.potential = [](const Vec& q) { return q.array().cos().sum() + 0.25 * q.squaredNorm(); };
  sys.id = "random";
  return sys;
}

inline SymmetricSystem constant_system(const Mat& m, int n, int k, int l, double v = 0.0) {
  SymmetricSystem sys;
  sys.n = n;
  sys.k = k;
  sys.l = l;
  sys.mass_matrix = [m](const Vec&) { return m; };
  sys.potential = [v](const Vec&) { return v; };
  return sys;
}

/// r, angle with K = diag(1, r^2) and V = c r^2 / 2.
inline SymmetricSystem central_force(double c = 0.0) {
  SymmetricSystem sys;
  sys.n = 1;
  sys.l = 1;
  sys.mass_matrix = [](const Vec& q) {
    Mat k = Mat::Zero(2, 2);
    k(0, 0) = 1;
    k(1, 1) = q[0] * q[0];
    return k;
  };
  sys.potential = [c](const Vec& q) { return 0.5 * c * q[0] * q[0]; };
  sys.pole_guard = [](const Vec& q) { return q[0]; };
  return sys;
}

inline Vec random_vec(std::mt19937_64& rng, int d, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Vec v(d);
  for (int i = 0; i < d; ++i) v[i] = u(rng);
  return v;
}

inline Vec vec(std::initializer_list<double> xs) {
  Vec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

}  // namespace routh::testing
