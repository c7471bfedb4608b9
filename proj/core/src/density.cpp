#include "geosob/potential/density.hpp"

#include <cmath>

#include "geosob/errors.hpp"

namespace geosob::potential {

double RadialDensity::grad_mag(double r) const {
  const double d = deriv(r);
  return d == 0.0 ? 0.0 : std::abs(d);
}

double RadialDensity::speed_scale(double r, int n) const {
  return std::pow(value(r), 1.0 / (n - 1));
}

double RadialDensity::power(double r, int n) const {
  return std::pow(value(r), double(n) / (n - 1));
}

RadialDensity constant_density() {
  RadialDensity d;
  d.base = [](double) { return 1.0; };
  d.dbase = [](double) { return 0.0; };
  d.name = "constant";
  return d;
}

RadialDensity radial_poly_density(const std::vector<double>& coeffs) {
  if (coeffs.empty()) throw Error("radial_poly_density: empty coefficients");
  RadialDensity d;
  d.base = [coeffs](double r) {
    double v = 0.0;
    for (std::size_t i = coeffs.size(); i-- > 0;) v = v * r + coeffs[i];
    return v;
  };
  d.dbase = [coeffs](double r) {
    double v = 0.0;
    for (std::size_t i = coeffs.size(); i-- > 1;)
      v = v * r + coeffs[i] * double(i);
    return v;
  };
  d.name = "radial_poly";
  return d;
}

double normalization_factor(double A, double B, int n) {
  if (!(A > 0.0) || !(B > 0.0)) {
    throw Error("normalization requires positive integrals");
  }
  return std::pow(A / (n * B), n - 1);
}

}  // namespace geosob::potential
