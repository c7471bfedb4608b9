#include "geosob/models/profile.hpp"

#include <cmath>
#include <memory>

#include "geosob/errors.hpp"

namespace geosob::models {

WarpedProfile euclidean_profile() {
  WarpedProfile p;
  p.phi = [](double r) { return r; };
  p.dphi = [](double) { return 1.0; };
  p.ddphi = [](double) { return 0.0; };
  p.asymptotic_slope = 1.0;
  p.name = "euclidean";
  return p;
}

WarpedProfile cone_smoothed_profile(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw Error("cone_smoothed profile requires alpha in (0,1]");
  }
  WarpedProfile p;
  p.phi = [alpha](double r) { return alpha * r + (1.0 - alpha) * (1.0 - std::exp(-r)); };
  p.dphi = [alpha](double r) { return alpha + (1.0 - alpha) * std::exp(-r); };
  p.ddphi = [alpha](double r) { return -(1.0 - alpha) * std::exp(-r); };
  p.asymptotic_slope = alpha;
  p.name = "cone_smoothed";
  return p;
}

namespace {

// Arc length r along the meridian of the paraboloid z = rho^2/4, as a
// function of the cylindrical radius rho, and its Newton inverse.
double paraboloid_arclength(double rho) {
  const double q = std::sqrt(1.0 + 0.25 * rho * rho);
  return 0.5 * rho * q + std::asinh(0.5 * rho);
}

double paraboloid_radius(double r, double rho_cap) {
  double rho = std::min(r, rho_cap);
  for (int i = 0; i < 50; ++i) {
    const double g = paraboloid_arclength(rho) - r;
    const double dg = std::sqrt(1.0 + 0.25 * rho * rho);  // dr/drho
    const double step = g / dg;
    rho -= step;
    if (std::abs(step) < 1e-15 * (1.0 + rho)) break;
  }
  return rho;
}

}  // namespace

WarpedProfile capped_paraboloid_profile(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error("capped_paraboloid profile requires alpha in (0,1)");
  }
  // slope along the cap: dphi = 1/sqrt(1 + rho^2/4); cap ends where it
  // reaches alpha
  const double rho_cap = 2.0 * std::sqrt(1.0 / (alpha * alpha) - 1.0);
  const double r_cap = paraboloid_arclength(rho_cap);

  WarpedProfile p;
  p.phi = [rho_cap, r_cap, alpha](double r) {
    if (r <= r_cap) return paraboloid_radius(r, rho_cap);
    return rho_cap + alpha * (r - r_cap);
  };
  p.dphi = [rho_cap, r_cap, alpha](double r) {
    if (r <= r_cap) {
      const double rho = paraboloid_radius(r, rho_cap);
      return 1.0 / std::sqrt(1.0 + 0.25 * rho * rho);
    }
    return alpha;
  };
  p.ddphi = [rho_cap, r_cap](double r) {
    if (r <= r_cap) {
      const double rho = paraboloid_radius(r, rho_cap);
      const double q = 1.0 + 0.25 * rho * rho;
      return -0.25 * rho / (q * q);
    }
    return 0.0;
  };
  p.asymptotic_slope = alpha;
  p.name = "capped_paraboloid";
  return p;
}

namespace {

struct CubicSpline {
  std::vector<double> x, y, m;  // m = second derivatives at knots
  double end_slope = 0.0;

  double eval(double r) const {
    const std::size_t n = x.size();
    if (r >= x.back()) return y.back() + end_slope * (r - x.back());
    std::size_t i = 0;
    while (i + 2 < n && x[i + 1] <= r) ++i;
    const double h = x[i + 1] - x[i];
    const double a = (x[i + 1] - r) / h;
    const double b = (r - x[i]) / h;
    return a * y[i] + b * y[i + 1] +
           h * h / 6.0 * ((a * a * a - a) * m[i] + (b * b * b - b) * m[i + 1]);
  }

  double eval_d(double r) const {
    const std::size_t n = x.size();
    if (r >= x.back()) return end_slope;
    std::size_t i = 0;
    while (i + 2 < n && x[i + 1] <= r) ++i;
    const double h = x[i + 1] - x[i];
    const double a = (x[i + 1] - r) / h;
    const double b = (r - x[i]) / h;
    return (y[i + 1] - y[i]) / h +
           h / 6.0 * ((3.0 * b * b - 1.0) * m[i + 1] - (3.0 * a * a - 1.0) * m[i]);
  }

  double eval_dd(double r) const {
    const std::size_t n = x.size();
    if (r >= x.back()) return 0.0;
    std::size_t i = 0;
    while (i + 2 < n && x[i + 1] <= r) ++i;
    const double h = x[i + 1] - x[i];
    const double a = (x[i + 1] - r) / h;
    const double b = (r - x[i]) / h;
    return a * m[i] + b * m[i + 1];
  }
};

}  // namespace

WarpedProfile spline_profile(const std::vector<double>& knots_r,
                             const std::vector<double>& knots_phi) {
  const std::size_t n = knots_r.size();
  if (n < 3 || knots_phi.size() != n) {
    throw Error("spline profile needs at least 3 matching knots");
  }
  if (std::abs(knots_r.front()) > 1e-14 || std::abs(knots_phi.front()) > 1e-14) {
    throw Error("spline profile must start at (0, 0)");
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (!(knots_r[i + 1] > knots_r[i])) {
      throw Error("spline profile knots must be strictly increasing");
    }
  }

  // Clamped slope 1 at r=0, natural (M=0) at the right end, solved by the
  // Thomas algorithm for the knot second derivatives.
  std::vector<double> h(n - 1), d(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = knots_r[i + 1] - knots_r[i];
    d[i] = (knots_phi[i + 1] - knots_phi[i]) / h[i];
  }
  std::vector<double> diag(n), lower(n), upper(n), rhs(n);
  diag[0] = h[0] / 3.0;
  upper[0] = h[0] / 6.0;
  rhs[0] = d[0] - 1.0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    lower[i] = h[i - 1] / 6.0;
    diag[i] = (h[i - 1] + h[i]) / 3.0;
    upper[i] = h[i] / 6.0;
    rhs[i] = d[i] - d[i - 1];
  }
  lower[n - 1] = 0.0;
  diag[n - 1] = 1.0;
  rhs[n - 1] = 0.0;

  for (std::size_t i = 1; i < n; ++i) {
    const double w = lower[i] / diag[i - 1];
    diag[i] -= w * upper[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  std::vector<double> m(n);
  m[n - 1] = rhs[n - 1] / diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) {
    m[i] = (rhs[i] - upper[i] * m[i + 1]) / diag[i];
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (m[i] > 1e-10) {
      throw Error("spline profile is convex at knot " + std::to_string(i) +
                  " (second derivative " + std::to_string(m[i]) + ")");
    }
  }

  auto spl = std::make_shared<CubicSpline>();
  spl->x = knots_r;
  spl->y = knots_phi;
  spl->m = std::move(m);
  spl->end_slope = spl->eval_d(knots_r.back() - 1e-13);

  WarpedProfile p;
  p.phi = [spl](double r) { return spl->eval(r); };
  p.dphi = [spl](double r) { return spl->eval_d(r); };
  p.ddphi = [spl](double r) { return spl->eval_dd(r); };
  p.asymptotic_slope = spl->end_slope;
  p.name = "spline";
  return p;
}

}  // namespace geosob::models
