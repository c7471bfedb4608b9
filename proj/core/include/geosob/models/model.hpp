#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "geosob/models/profile.hpp"

namespace geosob::models {

enum class CurvatureClass { ricci_nonneg, sectional_nonneg };

std::string to_string(CurvatureClass c);

/// Rotationally symmetric ambient manifold dr^2 + phi(r)^2 g_{S^{k-1}} with
/// a certified curvature sign and asymptotic volume ratio theta in (0,1].
struct WarpedModel {
  int dim = 2;
  WarpedProfile profile;
  CurvatureClass curvature_class = CurvatureClass::ricci_nonneg;
  double theta = 1.0;

  // Sectional curvature of planes containing the radial direction.
  double curvature_radial(double r) const {
    if (r < 1e-8) {
      // -phi''/phi with phi ~ r: one-sided guard at the pole
      return -profile.ddphi(1e-8) / profile.phi(1e-8);
    }
    return -profile.ddphi(r) / profile.phi(r);
  }

  // Sectional curvature of planes tangent to the distance sphere.
  double curvature_tangential(double r) const {
    if (r < 1e-8) return curvature_radial(r);
    const double dp = profile.dphi(r);
    const double p = profile.phi(r);
    return (1.0 - dp * dp) / (p * p);
  }
};

struct ProfileCertificate {
  bool accepted = false;
  double origin_value_violation = 0.0;   // |phi(0)|
  double origin_slope_violation = 0.0;   // |phi'(0) - 1|
  double max_concavity_violation = 0.0;  // max(phi'', 0) over the grid
  double max_slope_violation = 0.0;      // sectional class: phi' outside (0,1]
  double ratio_monotone_violation = 0.0; // increase of phi(r)/r over the grid
  double slope_consistency = 0.0;        // |phi(rmax)/rmax - asymptotic_slope|
  std::string reject_reason;
};

/// Checks the curvature-sign hypotheses of the profile on a sampled grid.
/// The grid must be nonempty, strictly increasing and start near zero.
ProfileCertificate validate_profile(const WarpedProfile& profile,
                                    CurvatureClass cls,
                                    std::span<const double> grid);

std::vector<double> default_validation_grid(double r_max = 50.0, int count = 400);

/// Volume of the Euclidean unit ball, pi^{k/2} / Gamma(k/2 + 1).
double unit_ball_volume(int k);

/// Volume of the geodesic ball of radius r about the pole,
/// k omega_k int_0^r phi^{k-1}.
double ball_volume(const WarpedModel& model, double r);

struct ThetaEstimate {
  double theta = 1.0;            // adopted value (slope-based)
  double slope_estimate = 1.0;   // Richardson-extrapolated (phi(r)/r)^{k-1}
  double volume_estimate = 1.0;  // Richardson-extrapolated vol/(omega_k r^k)
  std::vector<std::pair<double, double>> trace;  // (r, vol ratio at r)
};

/// Estimates theta by two routes (slope ratio and volume ratio, both
/// extrapolated in 1/r) and requires them to agree within 1e-6. Throws if
/// the profile has not stabilized by r_max or the estimators disagree.
ThetaEstimate asymptotic_volume_ratio(const WarpedModel& model, double r_max);

/// Validates the profile, computes theta and assembles the model.
/// Throws on a rejected certificate.
WarpedModel make_model(int dim, WarpedProfile profile, CurvatureClass cls,
                       double theta_r_max = 1000.0);

}  // namespace geosob::models
