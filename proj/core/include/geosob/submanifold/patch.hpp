#pragma once

#include <Eigen/Core>

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "geosob/models/model.hpp"

namespace geosob::submanifold {

struct ParamDomain {
  enum class Kind { disk, rectangle, interval };
  Kind kind = Kind::disk;
  double R = 1.0;                      // disk radius
  double a0 = 0.0, a1 = 1.0;           // rectangle/interval first coordinate
  double b0 = 0.0, b1 = 1.0;           // rectangle second coordinate
  bool periodic_b = false;             // rectangle periodic in b
  bool closed_curve = false;           // interval with identified endpoints
};

struct QuadNode {
  Eigen::Vector2d xi;
  double w;  // parameter-measure weight (chart area / chart length)
};

struct BoundaryNode {
  Eigen::Vector2d xi;
  double w;                // parameter line weight
  Eigen::Vector2d tangent; // parameter tangent of the boundary curve
};

/// Parametric immersed submanifold of Euclidean space (or a totally geodesic
/// 2-plane slice of a warped model, flagged by warped_ambient). Analytic
/// first and second parametric derivatives.
struct ImmersedPatch {
  std::string name = "patch";
  int n = 2;
  int ambient_dim = 4;
  ParamDomain domain;
  std::function<Eigen::VectorXd(const Eigen::Vector2d&)> F;
  std::function<std::array<Eigen::VectorXd, 2>(const Eigen::Vector2d&)> dF;
  std::function<std::array<Eigen::VectorXd, 3>(const Eigen::Vector2d&)> d2F;
  bool declared_minimal = false;

  // Warped slice case: Sigma = {rho <= R} in a totally geodesic 2-slice of
  // the model; intrinsic geometry is the 2-d warped sub-model, II = 0.
  std::shared_ptr<models::WarpedModel> warped_ambient;

  int codim() const { return ambient_dim - n; }
  bool is_warped_slice() const { return warped_ambient != nullptr; }

  std::vector<QuadNode> interior_quadrature(int level = 0) const;
  std::vector<BoundaryNode> boundary_quadrature(int level = 0) const;
};

/// Pointwise first/second fundamental data in the parameter chart.
struct PointGeometry {
  Eigen::MatrixXd tangent;           // ambient x n
  Eigen::MatrixXd normal;            // ambient x m, orthonormal, fixed gauge
  Eigen::MatrixXd g;                 // n x n
  Eigen::MatrixXd g_inv;
  double sqrt_det_g = 0.0;
  std::vector<Eigen::MatrixXd> II;   // per normal direction, chart basis
  Eigen::VectorXd H;                 // mean curvature, normal-frame comps
  double H_norm = 0.0;
  double min_g_eigenvalue = 0.0;
  double normal_residual = 0.0;      // orthonormality + tangency defect
};

PointGeometry extrinsic_geometry(const ImmersedPatch& patch,
                                 const Eigen::Vector2d& xi);

struct ExtrinsicSummary {
  double area = 0.0;
  double boundary_length = 0.0;
  double max_H = 0.0;
  double min_g_eigenvalue = 0.0;
  double max_normal_residual = 0.0;
};

ExtrinsicSummary extrinsic_summary(const ImmersedPatch& patch);

/// Re-embeds a codimension-1 patch with one appended zero coordinate; all
/// intrinsic data and |H| are preserved bit-for-bit, the new normal
/// direction carries no second fundamental form.
ImmersedPatch lift_codim1(const ImmersedPatch& patch);

/// Positive density on the patch, given on parameters.
struct SurfaceDensity {
  std::function<double(const Eigen::Vector2d&)> base;
  std::function<Eigen::Vector2d(const Eigen::Vector2d&)> dbase;
  double scale = 1.0;
  bool is_constant = true;

  double value(const Eigen::Vector2d& xi) const { return scale * base(xi); }
  Eigen::Vector2d grad_param(const Eigen::Vector2d& xi) const {
    return scale * dbase(xi);
  }
};

SurfaceDensity constant_surface_density();

struct MsSides {
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  double power_integral = 0.0;  // int f^{n/(n-1)}
  int n = 0, m = 0;
  double theta = 1.0;
};

/// Michael-Simon style functional sides; requires codim >= 2.
MsSides ms_sides(const ImmersedPatch& patch, const SurfaceDensity& f,
                 double theta);

/// Scales f so the Michael-Simon normalization identity holds on the patch.
SurfaceDensity normalize_surface_density(const ImmersedPatch& patch,
                                         const SurfaceDensity& f,
                                         double* lambda = nullptr);

// ---- preset corpus -------------------------------------------------------

ImmersedPatch flat_disk_patch(int ambient_dim = 4, double R = 1.0);
ImmersedPatch flat_strip_patch(double a = 1.2, double b = 0.7);
ImmersedPatch circle_patch();                  // closed curve in R^3
ImmersedPatch arc_patch();                     // normalized circular arc in R^3
ImmersedPatch spiral_patch();                  // normalized spiral arc in R^3
ImmersedPatch complex_curve_patch(int k = 2);  // z -> (z, z^k) in R^4
ImmersedPatch hemisphere_patch();              // codim 1 in R^3 (lift first)
ImmersedPatch catenoid_band_patch(double v0 = 0.6);  // codim 1 in R^3
ImmersedPatch warped_slice_patch(std::shared_ptr<models::WarpedModel> model,
                                 double R);

ImmersedPatch patch_by_name(const std::string& name, int k = 2,
                            std::shared_ptr<models::WarpedModel> model = nullptr,
                            double R = 1.0);

}  // namespace geosob::submanifold
