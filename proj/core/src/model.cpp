#include "geosob/models/model.hpp"

#include <algorithm>
#include <cmath>

#include "geosob/errors.hpp"
#include "geosob/num/quadrature.hpp"

namespace geosob::models {

std::string to_string(CurvatureClass c) {
  return c == CurvatureClass::ricci_nonneg ? "ricci" : "sectional";
}

std::vector<double> default_validation_grid(double r_max, int count) {
  std::vector<double> g;
  g.reserve(static_cast<std::size_t>(count));
  // geometric spacing resolves the cap region, a linear tail covers the cone
  const int n_geo = count / 2;
  const int n_lin = count - n_geo;
  const double split = 0.5 * r_max;
  for (int i = 0; i < n_geo; ++i) {
    g.push_back(1e-4 * std::pow(split / 1e-4, double(i) / double(n_geo)));
  }
  for (int i = 0; i <= n_lin; ++i) {
    g.push_back(split + (r_max - split) * double(i) / double(n_lin));
  }
  return g;
}

ProfileCertificate validate_profile(const WarpedProfile& profile,
                                    CurvatureClass cls,
                                    std::span<const double> grid) {
  if (grid.empty()) throw Error("validate_profile: empty grid");
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    if (!(grid[i] < grid[i + 1])) {
      throw Error("validate_profile: grid must be strictly increasing");
    }
  }
  if (grid.front() > 1e-2) {
    throw Error("validate_profile: grid must start near r = 0");
  }

  ProfileCertificate cert;
  cert.origin_value_violation = std::abs(profile.phi(0.0));
  cert.origin_slope_violation = std::abs(profile.dphi(0.0) - 1.0);

  double prev_ratio = profile.phi_over_r(grid.front());
  for (double r : grid) {
    cert.max_concavity_violation =
        std::max(cert.max_concavity_violation, profile.ddphi(r));
    if (cls == CurvatureClass::sectional_nonneg) {
      const double dp = profile.dphi(r);
      cert.max_slope_violation =
          std::max({cert.max_slope_violation, dp - 1.0, -dp});
    }
    const double ratio = profile.phi_over_r(r);
    cert.ratio_monotone_violation =
        std::max(cert.ratio_monotone_violation, ratio - prev_ratio);
    prev_ratio = ratio;
    if (!(profile.phi(r) > 0.0) && r > 0.0) {
      cert.reject_reason = "profile not positive at r = " + std::to_string(r);
      return cert;
    }
  }
  cert.max_concavity_violation = std::max(cert.max_concavity_violation, 0.0);
  cert.max_slope_violation = std::max(cert.max_slope_violation, 0.0);

  const double r_last = grid.back();
  cert.slope_consistency =
      std::abs(profile.phi_over_r(r_last) - profile.asymptotic_slope);

  const double tol = 1e-10;
  if (cert.origin_value_violation > tol || cert.origin_slope_violation > tol) {
    cert.reject_reason = "cone point: phi(0) != 0 or phi'(0) != 1";
    return cert;
  }
  if (cert.max_concavity_violation > tol) {
    cert.reject_reason = "phi'' > 0 somewhere (curvature sign violated)";
    return cert;
  }
  if (cls == CurvatureClass::sectional_nonneg && cert.max_slope_violation > tol) {
    cert.reject_reason = "phi' outside (0, 1] (sectional sign violated)";
    return cert;
  }
  if (cert.ratio_monotone_violation > tol) {
    cert.reject_reason = "phi(r)/r increases along the grid";
    return cert;
  }
  if (cert.slope_consistency > std::max(1e-6, 5.0 / r_last)) {
    cert.reject_reason = "phi(r)/r far from the declared asymptotic slope";
    return cert;
  }
  cert.accepted = true;
  return cert;
}

double unit_ball_volume(int k) {
  if (k < 1) throw Error("unit_ball_volume requires k >= 1");
  const double kk = static_cast<double>(k);
  return std::pow(M_PI, 0.5 * kk) / std::tgamma(0.5 * kk + 1.0);
}

double ball_volume(const WarpedModel& model, double r) {
  if (r < 0.0) throw Error("ball_volume requires r >= 0");
  if (r == 0.0) return 0.0;
  const int k = model.dim;
  const double area_coeff = k * unit_ball_volume(k);
  const auto integrand = [&](double s) {
    return std::pow(model.profile.phi(s), k - 1);
  };
  return area_coeff * num::integrate_value(integrand, 0.0, r);
}

namespace {

// Eliminates c1/R and c2/R^2 from samples at R/4, R/2, R.
double richardson3(double s_quarter, double s_half, double s_full) {
  const double e1 = 2.0 * s_full - s_half;
  const double e2 = 2.0 * s_half - s_quarter;
  return (4.0 * e1 - e2) / 3.0;
}

}  // namespace

ThetaEstimate asymptotic_volume_ratio(const WarpedModel& model, double r_max) {
  if (!(r_max > 1.0)) throw Error("asymptotic_volume_ratio: r_max too small");
  const int k = model.dim;
  const double km1 = static_cast<double>(k - 1);

  const auto slope_pow = [&](double r) {
    return std::pow(model.profile.phi_over_r(r), km1);
  };
  if (std::abs(slope_pow(r_max) - slope_pow(0.5 * r_max)) > 0.05) {
    throw Error("asymptotic_volume_ratio: slope ratio has not stabilized at r_max");
  }

  ThetaEstimate est;
  est.slope_estimate =
      std::pow(richardson3(model.profile.phi_over_r(0.25 * r_max),
                           model.profile.phi_over_r(0.5 * r_max),
                           model.profile.phi_over_r(r_max)),
               km1);

  const double omega = unit_ball_volume(k);
  const auto vol_ratio = [&](double r) {
    return ball_volume(model, r) / (omega * std::pow(r, k));
  };
  est.volume_estimate = richardson3(vol_ratio(0.25 * r_max),
                                    vol_ratio(0.5 * r_max), vol_ratio(r_max));

  for (int i = 0; i <= 16; ++i) {
    const double r = r_max * std::pow(2.0, -(16 - i) * 0.5);
    est.trace.emplace_back(r, vol_ratio(r));
  }

  if (std::abs(est.slope_estimate - est.volume_estimate) > 1e-6) {
    throw Error(
        "asymptotic_volume_ratio: slope and volume estimators disagree "
        "(profile asymptotics not reached at r_max)");
  }
  est.theta = est.slope_estimate;
  return est;
}

WarpedModel make_model(int dim, WarpedProfile profile, CurvatureClass cls,
                       double theta_r_max) {
  if (dim < 2) throw Error("WarpedModel requires dim >= 2");
  WarpedModel model;
  model.dim = dim;
  model.profile = std::move(profile);
  model.curvature_class = cls;

  const auto grid = default_validation_grid();
  const auto cert = validate_profile(model.profile, cls, grid);
  if (!cert.accepted) {
    throw Error("profile rejected: " + cert.reject_reason);
  }
  model.theta = asymptotic_volume_ratio(model, theta_r_max).theta;
  return model;
}

}  // namespace geosob::models
