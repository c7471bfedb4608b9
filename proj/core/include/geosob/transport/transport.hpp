#pragma once

#include <cstdint>
#include <string>

#include "geosob/geodesy/geodesic.hpp"
#include "geosob/geodesy/jacobi.hpp"
#include "geosob/potential/solution.hpp"

namespace geosob::transport {

struct TransportConfig {
  double r = 10.0;
  int sample_count = 1000;
  std::uint64_t seed = 42;
  double contact_tolerance = 1e-7;  // relative slack for contact membership
  double sigma = 0.0;
  double ode_tol = 1e-10;
};

/// Image and Jacobian data of the transport map at radius s along its ray.
struct PhiResult {
  double image_radius = 0.0;     // signed radial coordinate of the image
  double grad_norm = 0.0;        // |grad u|(s)
  double jacobian = 0.0;         // det D Phi_r
  double bound = 0.0;            // (1 + r f^{1/(n-1)})^n
  double speed_scale = 0.0;      // c = f(s)^{1/(n-1)}
  double monotone_increase = 0.0;
  double trace_margin = 0.0;
  bool conjugate = false;
  double first_conjugate_time = 0.0;
};

/// Phi_r(x) = exp_x(r grad u) for a radial potential; the geodesic is the
/// ray through x. Throws ConjugatePointError if det P crosses zero in (0,r).
PhiResult phi_map(const models::WarpedModel& model,
                  const potential::RadialPotential& sol, double s, double r,
                  double ode_tol = 1e-10);

struct ContactVerdict {
  bool in_U = false;
  bool is_contact = false;
  double margin = 0.0;           // min probe slack of the defining inequality
  double boundary_margin = 0.0;  // min slack among boundary probes
  double scale = 1.0;            // functional scale used for the tolerance
  int probes = 0;
  int skipped = 0;
};

struct ContactProbeOptions {
  int radial = 24;
  int angular = 10;
  int random = 48;
  std::uint64_t seed = 7;
  double contact_tolerance = 1e-7;
  geodesy::DistanceOptions dist;
};

/// Verifies membership of x (at radius s_bar) in the contact set A_r against
/// a probe family covering the domain.
ContactVerdict contact_test(const models::WarpedModel& model,
                            const potential::RadialPotential& sol,
                            double s_bar, double r,
                            const ContactProbeOptions& opts = {});

struct CoverageReport {
  bool vacuous = false;
  int targets = 0;
  int verified = 0;
  int boundary_hits = 0;   // minimizer found on the domain boundary
  int not_in_U = 0;
  double worst_image_error = 0.0;
  double fraction = 0.0;
  int spot_checked = 0;          // targets given the full 2-d slice check
  double worst_spot_margin = 0.0;
  double rho_max = 0.0;          // radius of the verified target region
};

struct CoverageOptions {
  int spot_targets = 8;      // slice-grid minimality checks (distance solves)
  int spot_radial = 10;
  int spot_angular = 5;
  double image_tol = 1e-6;
  geodesy::DistanceOptions dist;
};

/// Samples far targets p, minimizes x -> r u(x) + d(x,p)^2/2 and verifies
/// the minimizer lands in U with Phi_r(minimizer) = p.
CoverageReport coverage_experiment(const models::WarpedModel& model,
                                   const potential::RadialPotential& sol,
                                   const potential::GeoDomain& D,
                                   const TransportConfig& cfg,
                                   const CoverageOptions& opts = {});

struct CaptureReport {
  std::string status;     // pass | fail | inconclusive | vacuous
  double lhs_mc = 0.0;
  double lhs_stderr = 0.0;
  double lhs_exact = 0.0;  // closed form via the radial reduction
  double rhs = 0.0;
  double slack = 0.0;      // rhs - lhs_mc
  double lhs_over_rn = 0.0;
  double rho_min = 0.0, rho_max = 0.0;
  std::uint64_t seed = 0;
};

/// Monte Carlo check of  |{p : sigma r < d(x,p) < r for all x in D}|
/// <= int_U (1 + r f^{1/(n-1)})^n.
CaptureReport capture_inequality(const models::WarpedModel& model,
                                 const potential::RadialPotential& sol,
                                 const potential::GeoDomain& D,
                                 const TransportConfig& cfg);

/// Largest rho with max_{x in D} d(x, (rho, omega)) < r (bisection over the
/// far-field radius; the maximum is taken at the antipodal boundary point
/// and spot-verified on a sample grid).
double far_ball_radius(const models::WarpedModel& model,
                       const potential::GeoDomain& D, double r,
                       const geodesy::DistanceOptions& dist = {});

}  // namespace geosob::transport
