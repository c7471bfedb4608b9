#pragma once

#include <functional>
#include <memory>

#include "geosob/potential/solution.hpp"
#include "geosob/submanifold/patch.hpp"

namespace geosob::submanifold {

/// Potential on the patch, queried in parameter coordinates. For n = 1 the
/// second chart coordinate is ignored. hess_cov returns covariant chart
/// components of the surface Hessian.
struct SurfaceSolution {
  int n = 2;
  std::function<double(const Eigen::Vector2d&)> u;
  std::function<Eigen::Vector2d(const Eigen::Vector2d&)> grad_param;
  std::function<Eigen::Matrix2d(const Eigen::Vector2d&)> hess_cov;
  double residual_interior = 0.0;
  double residual_neumann = 0.0;
  double h = 0.0;  // 0 for closed-form paths
  std::shared_ptr<potential::MeshPotential> mesh;
};

enum class SurfaceMethod { automatic, closed_form, mesh };

/// Chart metric induced by the immersion (analytic metric, finite-difference
/// metric derivatives for the Christoffel symbols).
potential::ChartMetric patch_chart_metric(const ImmersedPatch& patch);

/// Solves div_Sigma(f grad u) = n f^{n/(n-1)} - sqrt(|grad f|^2 + f^2 |H|^2)
/// with unit co-normal data. Requires f normalized on the patch.
SurfaceSolution surface_potential(const ImmersedPatch& patch,
                                  const SurfaceDensity& f,
                                  SurfaceMethod method = SurfaceMethod::automatic,
                                  double mesh_h = 0.05);

/// Margin of Delta_Sigma u - <H, y> <= n f^{1/(n-1)} over interior samples
/// and admissible normal vectors y.
struct SurfaceLaplacianMargin {
  double min_margin = 0.0;
  int samples = 0;
};
SurfaceLaplacianMargin surface_laplacian_margin(const ImmersedPatch& patch,
                                                const SurfaceSolution& sol,
                                                const SurfaceDensity& f,
                                                int y_samples = 8,
                                                std::uint64_t seed = 5);

}  // namespace geosob::submanifold
