#include "routh/errors.hpp"
#include "routh/integrate.hpp"

namespace routh {

namespace {

// Weights of the quadratic through (0, a, b) integrated over [0, a] and [0, b].
struct TripleWeights {
  double first[3];
  double whole[3];
};

TripleWeights triple_weights(double h0, double h1) {
  const double a = h0;
  const double b = h0 + h1;
  TripleWeights w{};
  w.first[0] = a * (3 * b - a) / (6 * b);
  w.first[1] = a * (3 * b - 2 * a) / (6 * (b - a));
  w.first[2] = -a * a * a / (6 * b * (b - a));
  w.whole[0] = b * (3 * a - b) / (6 * a);
  w.whole[1] = b * b * b / (6 * a * (b - a));
  w.whole[2] = b * (2 * b - 3 * a) / (6 * (b - a));
  return w;
}

void check_grid(std::span<const double> t, std::span<const double> f) {
  if (t.size() != f.size()) {
    throw Error(ErrorKind::GridMismatch, "quadrature grid and samples differ in length");
  }
  if (t.size() < 2) {
    throw Error(ErrorKind::GridMismatch, "quadrature needs at least two samples");
  }
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (!(t[i] > t[i - 1])) {
      throw Error(ErrorKind::GridMismatch, "quadrature grid is not strictly increasing");
    }
  }
}

}  // namespace

std::vector<double> cumulative_simpson(std::span<const double> t, std::span<const double> f) {
  check_grid(t, f);
  const std::size_t n = t.size();
  std::vector<double> out(n, 0.0);
  if (n == 2) {
    out[1] = 0.5 * (t[1] - t[0]) * (f[0] + f[1]);
    return out;
  }
  std::size_t i = 0;
  for (; i + 2 < n; i += 2) {
    const auto w = triple_weights(t[i + 1] - t[i], t[i + 2] - t[i + 1]);
    out[i + 1] = out[i] + w.first[0] * f[i] + w.first[1] * f[i + 1] + w.first[2] * f[i + 2];
    out[i + 2] = out[i] + w.whole[0] * f[i] + w.whole[1] * f[i + 1] + w.whole[2] * f[i + 2];
  }
  if (i + 1 < n) {
    // one interval left: second half of the last three-point quadratic
    const std::size_t j = n - 3;
    const auto w = triple_weights(t[j + 1] - t[j], t[j + 2] - t[j + 1]);
    double tail = 0.0;
    for (int m = 0; m < 3; ++m) tail += (w.whole[m] - w.first[m]) * f[j + m];
    out[n - 1] = out[n - 2] + tail;
  }
  return out;
}

double simpson(std::span<const double> t, std::span<const double> f) {
  return cumulative_simpson(t, f).back();
}

}  // namespace routh
