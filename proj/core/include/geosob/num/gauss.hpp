#pragma once

#include <cmath>
#include <utility>
#include <vector>

namespace geosob::num {

/// Gauss-Legendre nodes and weights on [-1,1] by Newton iteration on the
/// Legendre recurrence.
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre(
    int n) {
  std::vector<double> x(n), w(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
    w[n - 1 - i] = w[i];
  }
  return {x, w};
}

/// Nodes/weights mapped to [a,b].
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre(
    int n, double a, double b) {
  auto [x, w] = gauss_legendre(n);
  for (int i = 0; i < n; ++i) {
    x[i] = 0.5 * (a + b) + 0.5 * (b - a) * x[i];
    w[i] *= 0.5 * (b - a);
  }
  return {x, w};
}

}  // namespace geosob::num
