#pragma once

#include <functional>
#include <string>
#include <vector>

namespace geosob::models {

/// Rotationally symmetric warping profile phi for the metric
/// dr^2 + phi(r)^2 g_{S^{k-1}}. A smooth pole requires phi(0) = 0 and
/// phi'(0) = 1; concavity of phi certifies nonnegative Ricci curvature.
struct WarpedProfile {
  std::function<double(double)> phi;
  std::function<double(double)> dphi;
  std::function<double(double)> ddphi;
  double asymptotic_slope = 1.0;  // limit of phi(r)/r
  std::string name = "custom";

  /// phi(r)/r, series-guarded at the pole.
  double phi_over_r(double r) const {
    if (r < 1e-8) return 1.0 + 0.5 * ddphi(0.0) * r;
    return phi(r) / r;
  }
};

WarpedProfile euclidean_profile();

/// phi(r) = alpha r + (1-alpha)(1 - e^{-r}); asymptotically a cone of
/// slope alpha in (0,1], smooth everywhere, concave.
WarpedProfile cone_smoothed_profile(double alpha);

/// Paraboloid-of-revolution cap glued C^1 to its tangent cone; the final
/// slope alpha in (0,1) fixes the cap extent.
WarpedProfile capped_paraboloid_profile(double alpha);

/// Concave C^2 cubic spline through (r_i, phi_i) with clamped unit slope at
/// r = 0 and linear extension beyond the last knot. Throws if the knot data
/// violates phi(0) = 0 or convexity appears at any knot.
WarpedProfile spline_profile(const std::vector<double>& knots_r,
                             const std::vector<double>& knots_phi);

}  // namespace geosob::models
