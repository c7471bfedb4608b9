#pragma once

#include <functional>

#include "geosob/potential/solution.hpp"

namespace geosob::potential {

/// Scales the density so that  int |grad f| + int_bdry f = n int f^{n/(n-1)}
/// on the radial domain (the Neumann compatibility identity). Idempotent.
RadialDensity normalize_density(const RadialDensity& f, const GeoDomain& D,
                                const models::WarpedModel& model,
                                NormalizationReport* report = nullptr);

/// Closed-form radial solve on a geodesic ball or annulus. Requires a
/// normalized density (checked through the Neumann value at the boundary).
RadialPotential solve_radial(const RadialDensity& f, const GeoDomain& D,
                             const models::WarpedModel& model);

/// Scalar field on the chart with an analytic gradient.
struct ChartField {
  std::function<double(const Eigen::Vector2d&)> value;
  std::function<Eigen::Vector2d(const Eigen::Vector2d&)> grad;
};

ChartField chart_field_from_radial(const RadialDensity& f);

struct FemOptions {
  double min_angle_deg = 20.0;
  // the continuum identity must hold to 1e-6; the discrete assembly adds an
  // O(h^2) quadrature mismatch of its own
  double compat_rel_tol = 1e-6;
  double compat_h2_factor = 0.5;
};

/// P1 finite element solve of the weak problem
///   int f <grad u, grad v> = -int rhs v + int_bdry neumann v
/// in the chart metric, with the metric zero-mean constraint.
MeshPotential solve_mesh_weak(const Mesh& mesh, const ChartMetric& metric,
                              const ChartField& f,
                              const std::function<double(const Eigen::Vector2d&)>& rhs,
                              const std::function<double(const Eigen::Vector2d&)>& neumann,
                              const FemOptions& opts = {});

/// Mesh solve of the potential problem for a radial density on a meshed
/// region of the model (dim 2). rhs and boundary data come from the density.
MeshPotential solve_mesh(const RadialDensity& f, const GeoDomain& D,
                         const models::WarpedModel& model,
                         const FemOptions& opts = {});

}  // namespace geosob::potential
