#pragma once

#include <Eigen/Core>

#include <functional>
#include <memory>
#include <vector>

#include "geosob/geodesy/geodesic.hpp"
#include "geosob/models/model.hpp"

namespace geosob::geodesy {

/// Curvature matrix S(t) = R(gamma', E_i, gamma', E_j) in a parallel
/// orthonormal frame along a geodesic.
using CurvatureMatrixFn = std::function<Eigen::MatrixXd(double)>;

struct JacobiInit {
  Eigen::MatrixXd P0;
  Eigen::MatrixXd P0prime;
};

struct JacobiOptions {
  double tol = 1e-10;
  int samples = 512;
  double t0_eval = 1e-6;  // smallest t for Riccati-based evaluations
};

/// Matrix Jacobi system P'' = -P S sampled on a uniform grid, with the
/// scaled determinant t^{-m} det P carried in a cancellation-free form.
/// block_m > 0 marks the normal-bundle block layout (tangent indices first,
/// normal indices last) whose P(0) has an m-dimensional kernel.
struct JacobiSystem {
  int dim = 0;
  int block_n = 0;
  int block_m = 0;
  std::vector<double> t;
  std::vector<Eigen::MatrixXd> P;
  std::vector<Eigen::MatrixXd> Pprime;
  std::vector<Eigen::MatrixXd> S;
  std::vector<double> det_scaled;  // t^{-m} det P(t)

  bool conjugate_point = false;
  double first_conjugate_time = 0.0;
  double ode_residual = 0.0;       // max ||P'' + P S|| on the dense output
  double symmetry_residual = 0.0;  // max ||P' P^T - P P'^T||
  double min_S_eigenvalue = 0.0;

  /// Q(t_i) = P^{-1} P'.
  Eigen::MatrixXd Q(std::size_t i) const;

  /// tr Q(t_i) - m/t_i, formed without the 1/t cancellation.
  double trace_Q_reduced(std::size_t i) const;

  std::size_t first_eval_index(double t0_eval = 1e-6) const;
};

JacobiSystem propagate_jacobi(const JacobiInit& init, const CurvatureMatrixFn& S,
                              double t_max, int block_m = 0,
                              const JacobiOptions& opts = {});

/// Propagates the Jacobi system along a geodesic of the model, evaluating
/// the warped-product curvature exactly at the integrator stage times.
/// `frame` gives the caller's parallel frame in the geodesic-adapted basis
/// (in-plane normal, off-plane directions, unit tangent last); identity by
/// default. Returns the sampled system; the geodesic curve itself can be
/// recovered with exp_map.
JacobiSystem propagate_jacobi_along(const models::WarpedModel& model,
                                    const PolarPoint& x, const TangentVector& v,
                                    double t_max, const JacobiInit& init,
                                    const Eigen::MatrixXd& frame,
                                    int block_m = 0,
                                    const JacobiOptions& opts = {});

/// Curvature matrix of the warped model in the geodesic-adapted parallel
/// frame at slice state (rho, drho), for a geodesic of speed c and angular
/// momentum L.
Eigen::MatrixXd adapted_curvature_matrix(const models::WarpedModel& model,
                                         double rho, double drho, double c,
                                         double L);

struct TraceBoundReport {
  double min_margin = 0.0;   // min over samples of bound - tr Q
  double argmin_t = 0.0;
  double initial_trace = 0.0;  // tr Q(0+) - m/t absorbed
  bool initial_ok = false;     // tr Q(0+) <= n c
  std::vector<double> margins;
};

/// Margin of tr Q(t) <= m/t + n c / (1 + t c) over the sample grid.
TraceBoundReport riccati_trace_bound(const JacobiSystem& sys, double c);

struct MonotonicityReport {
  double max_forward_increase = 0.0;  // of rho(t) = t^{-m}(1+tc)^{-n} det P
  double rho_initial = 0.0;
  double rho_final = 0.0;
  std::vector<double> rho;
};

MonotonicityReport jacobian_ratio_monotone(const JacobiSystem& sys, double c);

/// Second-variation index form: hessian_term + int (|Z'|^2 - Z^T S Z) dt on
/// the system's sample grid. Z and Zdot are parallel-frame components.
double index_form(const JacobiSystem& sys,
                  const std::vector<Eigen::VectorXd>& Z,
                  const std::vector<Eigen::VectorXd>& Zdot,
                  double hessian_term);

}  // namespace geosob::geodesy
