#pragma once

#include <cstdint>
#include <string>

#include "geosob/geodesy/jacobi.hpp"
#include "geosob/submanifold/patch.hpp"
#include "geosob/submanifold/surface.hpp"

namespace geosob::submanifold {

/// One normal-bundle transport sample Phi_r(x, y) = exp_x(r grad u + r y),
/// with the block Jacobi data and the bounds it must satisfy at contact
/// points. y is given in the patch's normal frame.
struct NormalSample {
  bool in_U = false;
  double speed2 = 0.0;           // |grad u|^2 + |y|^2
  double speed_scale = 0.0;      // c = f^{1/(n-1)}
  double jacobian = 0.0;         // det D Phi_r = r^m * det_scaled
  double det_scaled = 0.0;       // r^{-m} det P(r)
  double bound_scaled = 0.0;     // (1 + r c)^n
  double det_scaled_origin = 0.0;  // limit of t^{-m} det P at t -> 0
  double monotone_increase = 0.0;
  double trace_margin = 0.0;
  double positivity_min_eig = 0.0;  // min eig of I + r (D^2u - <II, y>)
  bool conjugate = false;
  double first_conjugate_time = 0.0;
  Eigen::MatrixXd second_form;  // D^2 u - <II, y> in the orthonormal frame
};

NormalSample normal_transport(const ImmersedPatch& patch,
                              const SurfaceSolution& sol,
                              const SurfaceDensity& f,
                              const Eigen::Vector2d& xi,
                              const Eigen::VectorXd& y, double r,
                              double ode_tol = 1e-10);

struct SubContactVerdict {
  bool in_U = false;
  bool is_contact = false;
  double margin = 0.0;
  double scale = 1.0;
  int probes = 0;
};

/// A_r membership test for (x, y) against patch probes (Euclidean ambient).
SubContactVerdict contact_test(const ImmersedPatch& patch,
                               const SurfaceSolution& sol,
                               const Eigen::Vector2d& xi,
                               const Eigen::VectorXd& y, double r,
                               double contact_tolerance = 1e-7);

struct ShellReport {
  std::string status;  // pass | fail | inconclusive | vacuous
  double lhs_mc = 0.0;
  double lhs_stderr = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  double limit_lhs = 0.0;  // (n+m) omega_{n+m} theta
  double limit_rhs = 0.0;  // m omega_m int f^{n/(n-1)}
  double r = 0.0, sigma = 0.0;
  std::uint64_t seed = 0;
};

/// Monte Carlo check of the shell bound
///   |{p : sigma r < d(x,p) < r for all x in Sigma}|
///   <= (m/2) omega_m (1 - sigma^2) int_Omega r^m (1 + r f^{1/(n-1)})^n.
ShellReport shell_capture(const ImmersedPatch& patch,
                          const SurfaceSolution& sol, const SurfaceDensity& f,
                          double r, double sigma, long budget,
                          std::uint64_t seed);

}  // namespace geosob::submanifold
