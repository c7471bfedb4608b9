#pragma once

#include <Eigen/Core>

#include <optional>
#include <vector>

#include "geosob/models/model.hpp"

namespace geosob::geodesy {

/// Point of the model in polar form: radial distance from the pole and a
/// unit direction on S^{k-1}.
struct PolarPoint {
  double r = 0.0;
  Eigen::VectorXd omega;
};

PolarPoint make_polar(double r, Eigen::VectorXd omega);

/// Tangent vector in the (radial, spherical) orthonormal split:
/// v = radial * d/dr + spherical * dir, with dir a unit vector tangent to
/// the sphere factor (metric norm of the spherical part is `spherical`).
/// At the pole pass spherical = 0 and encode the travel direction in the
/// base point's omega.
struct TangentVector {
  double radial = 0.0;
  double spherical = 0.0;
  Eigen::VectorXd dir;

  double norm() const;
};

/// Geodesics stay inside a totally geodesic 2-plane slice through the pole;
/// samples carry the slice polar coordinates. rho is signed: a radial
/// geodesic through the pole continues with rho < 0 on the ray -omega0.
struct GeodesicSample {
  double t = 0.0;
  double rho = 0.0;
  double psi = 0.0;
  double drho = 0.0;
  double dpsi = 0.0;
  double a = 0.0;  // unit-tangent radial component
  double b = 0.0;  // unit-tangent circumferential component
};

struct GeodesicCurve {
  Eigen::VectorXd omega0;  // slice basis: start direction on the sphere
  Eigen::VectorXd what;    // slice basis: orthogonal direction (zero if radial)
  bool radial = false;
  double speed = 0.0;             // |gamma'|, conserved
  double angular_momentum = 0.0;  // L = phi^2 psi'
  double t_max = 0.0;
  std::vector<GeodesicSample> samples;
  double energy_drift = 0.0;    // max | |gamma'(t)| - speed |
  double frame_residual = 0.0;  // max |a^2 + b^2 - 1|

  PolarPoint point_at(const GeodesicSample& s) const;
  PolarPoint endpoint() const { return point_at(samples.back()); }
};

struct ExpOptions {
  double tol = 1e-10;
  int samples = 512;  // uniform report grid intervals
};

/// Integrates the warped-product geodesic with initial point x and velocity
/// v up to parameter t. Throws IntegrationError on step underflow.
GeodesicCurve exp_map(const models::WarpedModel& model, const PolarPoint& x,
                      const TangentVector& v, double t,
                      const ExpOptions& opts = {});

struct DistanceOptions {
  double tol = 1e-10;        // ODE tolerance for the shots
  int scan = 24;             // initial bracket scan resolution over the angle
  int bisect_iters = 46;
  double psi_locate_tol = 1e-12;
};

struct SliceShot {
  double beta = 0.0;    // initial angle from the outward radial direction
  double length = 0.0;  // geodesic length realising the distance
  int integrations = 0;
  int roots = 0;
};

/// Distance between (r0, psi=0) and (r1, psi=dpsi), dpsi in [0, pi], inside
/// a 2-plane slice, by shooting over the initial angle (bisection plus
/// secant polish). Throws ShootingError if no connecting geodesic is found.
double slice_distance(const models::WarpedModel& model, double r0, double r1,
                      double dpsi, const DistanceOptions& opts = {},
                      SliceShot* shot = nullptr);

/// Distance between two points of the model; reduces to the totally
/// geodesic slice through both.
double distance(const models::WarpedModel& model, const PolarPoint& x,
                const PolarPoint& p, const DistanceOptions& opts = {},
                SliceShot* shot = nullptr);

/// Angle on the sphere between the direction parts of two points.
double sphere_angle(const PolarPoint& x, const PolarPoint& p);

}  // namespace geosob::geodesy
