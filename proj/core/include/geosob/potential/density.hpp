#pragma once

#include <functional>
#include <string>
#include <vector>

namespace geosob::potential {

/// Positive radial density with analytic derivative; `scale` carries the
/// normalization factor lambda applied so far.
struct RadialDensity {
  std::function<double(double)> base;
  std::function<double(double)> dbase;
  double scale = 1.0;
  std::string name = "constant";

  double value(double r) const { return scale * base(r); }
  double deriv(double r) const { return scale * dbase(r); }
  double grad_mag(double r) const;  // |grad f|, exactly 0 at critical points

  /// f^{1/(n-1)}, the contact-speed scale entering the Jacobian bounds.
  double speed_scale(double r, int n) const;
  /// f^{n/(n-1)}.
  double power(double r, int n) const;
};

RadialDensity constant_density();

/// f(r) = sum_i coeffs[i] r^i; must stay positive on the domain (checked by
/// the solvers).
RadialDensity radial_poly_density(const std::vector<double>& coeffs);

struct NormalizationReport {
  double lambda = 1.0;
  double lhs_integral = 0.0;   // int |grad f| + int_bdry f   (after scaling)
  double power_integral = 0.0; // int f^{n/(n-1)}             (after scaling)
  double residual = 0.0;       // |lhs - n * power| / lhs
};

/// lambda = (A / (n B))^{n-1} for raw integrals A, B.
double normalization_factor(double A, double B, int n);

}  // namespace geosob::potential
