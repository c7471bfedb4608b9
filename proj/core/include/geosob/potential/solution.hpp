#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <vector>

#include "geosob/models/model.hpp"
#include "geosob/num/interp.hpp"
#include "geosob/potential/density.hpp"
#include "geosob/potential/mesh.hpp"

namespace geosob::potential {

/// Compact domain in the model. Balls and annuli are radial about the pole;
/// meshed regions live in the normal-coordinate chart (dim 2 only).
struct GeoDomain {
  enum class Kind { geodesic_ball, geodesic_annulus, meshed_region };
  Kind kind = Kind::geodesic_ball;
  double R0 = 0.0;
  double R1 = 1.0;
  std::shared_ptr<Mesh> mesh;

  static GeoDomain ball(double R) {
    return GeoDomain{Kind::geodesic_ball, 0.0, R, nullptr};
  }
  static GeoDomain annulus(double R0, double R1) {
    return GeoDomain{Kind::geodesic_annulus, R0, R1, nullptr};
  }
  static GeoDomain meshed(std::shared_ptr<Mesh> m) {
    return GeoDomain{Kind::meshed_region, 0.0, 0.0, std::move(m)};
  }
};

/// Solution of div(f grad u) = n f^{n/(n-1)} - |grad f| with unit Neumann
/// data, reduced by rotational symmetry. Radial derivative data is exact up
/// to quadrature.
class RadialPotential {
 public:
  RadialPotential(const models::WarpedModel& model, RadialDensity density,
                  double R0, double R1);

  double u(double r) const { return u_.eval(clampr(r)); }
  double du(double r) const;
  double d2u(double r) const;
  double laplacian(double r) const;

  /// Hessian in the polar orthonormal frame: diag(u'', u' phi'/phi, ...).
  double hessian_radial(double r) const { return d2u(r); }
  double hessian_tangential(double r) const;

  double R0_bound() const { return R0_; }
  double R1_bound() const { return R1_; }
  int dim() const { return n_; }
  const RadialDensity& density() const { return density_; }
  const models::WarpedModel& model() const { return model_; }

  double residual_interior() const { return residual_interior_; }
  double residual_neumann() const { return residual_neumann_; }

 private:
  double clampr(double r) const { return std::clamp(r, R0_, R1_); }

  models::WarpedModel model_;
  RadialDensity density_;
  int n_;
  double R0_, R1_;
  num::HermiteSpline u_, du_, prefix_;
  double residual_interior_ = 0.0;
  double residual_neumann_ = 0.0;
};

struct MeshPotential {
  std::shared_ptr<Mesh> mesh;
  ChartMetric metric;
  Eigen::VectorXd u;                        // nodal values, metric zero mean
  std::vector<Eigen::Vector2d> grad;        // recovered chart gradients
  std::vector<Eigen::Matrix2d> hess_chart;  // recovered chart second derivatives
  Eigen::VectorXd f_node;                   // density at nodes
  double h = 0.0;                           // chart mesh size
  double residual_algebraic = 0.0;
  double residual_neumann = 0.0;            // elementwise flux vs 1 on boundary
  double compatibility_residual = 0.0;

  double value(const Eigen::Vector2d& x) const;
  Eigen::Vector2d gradient(const Eigen::Vector2d& x) const;  // chart components
  Eigen::Matrix2d hessian_chart(const Eigen::Vector2d& x) const;
  /// Covariant Hessian (chart components) at x: dd u - Gamma^c du_c.
  Eigen::Matrix2d hessian_covariant(const Eigen::Vector2d& x) const;
  /// |grad u|_g at x.
  double grad_norm(const Eigen::Vector2d& x) const;
  double laplacian(const Eigen::Vector2d& x) const;
};

struct LaplacianMargin {
  double min_margin = 0.0;  // min over U of n f^{1/(n-1)} - Delta u
  double argmin_r = 0.0;
  std::size_t points_in_U = 0;
};

/// Margin of the interior Laplacian bound on U = {|grad u| < 1}.
LaplacianMargin laplacian_bound_check(const RadialPotential& sol,
                                      int probe_count = 2048);
LaplacianMargin laplacian_bound_check(const MeshPotential& sol, int n,
                                      const ChartMetric& metric);

}  // namespace geosob::potential
