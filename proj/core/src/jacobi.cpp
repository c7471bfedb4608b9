#include "geosob/geodesy/jacobi.hpp"

#include <Eigen/Dense>

#include <cmath>

#include "geosob/errors.hpp"
#include "geosob/num/interp.hpp"
#include "geosob/num/ode.hpp"

namespace geosob::geodesy {

namespace {

void flatten(const Eigen::MatrixXd& P, const Eigen::MatrixXd& Pp,
             Eigen::VectorXd& y, int offset) {
  const int k = static_cast<int>(P.rows());
  Eigen::Map<Eigen::MatrixXd>(y.data() + offset, k, k) = P;
  Eigen::Map<Eigen::MatrixXd>(y.data() + offset + k * k, k, k) = Pp;
}

struct Unflat {
  Eigen::Map<const Eigen::MatrixXd> P, Pp;
  Unflat(const Eigen::VectorXd& y, int offset, int k)
      : P(y.data() + offset, k, k), Pp(y.data() + offset + k * k, k, k) {}
};

// Scaled determinant t^{-m} det P computed by dividing the normal-block
// columns by t before the factorisation (no cancellation at small t).
double scaled_det(const Eigen::MatrixXd& P, double t, int m) {
  if (m == 0) return P.determinant();
  Eigen::MatrixXd Ps = P;
  const int k = static_cast<int>(P.cols());
  if (t > 0.0) {
    Ps.rightCols(m) /= t;
    return Ps.determinant();
  }
  // t = 0 limit: the scaled columns tend to the P' normal-block columns;
  // the caller substitutes them.
  (void)k;
  return 0.0;
}

JacobiSystem sample_system(const num::OdeSolution& sol,
                           const CurvatureMatrixFn& S_of_t,
                           const JacobiInit& init, double t_max, int block_m,
                           const JacobiOptions& opts, int state_offset) {
  const int k = static_cast<int>(init.P0.rows());
  JacobiSystem sys;
  sys.dim = k;
  sys.block_m = block_m;
  sys.block_n = k - block_m;

  const int n_samp = opts.samples;
  sys.t.resize(n_samp + 1);
  sys.P.resize(n_samp + 1);
  sys.Pprime.resize(n_samp + 1);
  sys.S.resize(n_samp + 1);
  sys.det_scaled.resize(n_samp + 1);
  sys.min_S_eigenvalue = std::numeric_limits<double>::infinity();

  for (int i = 0; i <= n_samp; ++i) {
    const double ti = t_max * double(i) / double(n_samp);
    sys.t[i] = ti;
    Eigen::VectorXd yi = sol.eval(std::min(ti, sol.t_end()));
    const Unflat u(yi, state_offset, k);
    sys.P[i] = u.P;
    sys.Pprime[i] = u.Pp;
    sys.S[i] = S_of_t(ti);

    if (i == 0 && block_m > 0) {
      // limit of the column-scaled matrix at t -> 0
      Eigen::MatrixXd lim = init.P0;
      lim.rightCols(block_m) = init.P0prime.rightCols(block_m);
      sys.det_scaled[i] = lim.determinant();
    } else {
      sys.det_scaled[i] = scaled_det(sys.P[i], ti, block_m);
    }

    const Eigen::MatrixXd sym = sys.Pprime[i] * sys.P[i].transpose();
    sys.symmetry_residual = std::max(
        sys.symmetry_residual, (sym - sym.transpose()).cwiseAbs().maxCoeff());

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
        0.5 * (sys.S[i] + sys.S[i].transpose()));
    sys.min_S_eigenvalue =
        std::min(sys.min_S_eigenvalue, es.eigenvalues().minCoeff());

    // residual of P'' + P S via the dense-output derivative of P'
    if (i > 0 && i < n_samp) {
      const auto& step = sol.step_at(ti);
      Eigen::VectorXd dyi = step.eval_deriv(ti);
      Eigen::Map<const Eigen::MatrixXd> Pdd(dyi.data() + state_offset + k * k,
                                            k, k);
      const double res = (Pdd + sys.P[i] * sys.S[i]).cwiseAbs().maxCoeff();
      sys.ode_residual = std::max(sys.ode_residual, res);
    }
  }

  // first degeneration of det P on (0, t_max): a sign change, or a dip to
  // zero at even multiplicity (relative floor against the running maximum)
  const auto det_at = [&](double t) {
    Eigen::VectorXd ym = sol.eval(std::min(t, sol.t_end()));
    const Unflat um(ym, state_offset, k);
    return scaled_det(um.P, t, block_m);
  };
  const auto golden_min = [&](double a, double b, double* min_val) {
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = det_at(x1), f2 = det_at(x2);
    for (int it = 0; it < 90 && b - a > 1e-13 * (1.0 + b); ++it) {
      if (f1 > f2) {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + gr * (b - a);
        f2 = det_at(x2);
      } else {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - gr * (b - a);
        f1 = det_at(x1);
      }
    }
    *min_val = std::min(f1, f2);
    return 0.5 * (a + b);
  };

  double running_max = std::abs(sys.det_scaled[0]);
  for (int i = 1; i <= n_samp && !sys.conjugate_point; ++i) {
    running_max = std::max(running_max, std::abs(sys.det_scaled[i - 1]));
    if (sys.det_scaled[i] <= 0.0) {
      sys.conjugate_point = true;
      double lo = sys.t[i - 1], hi = sys.t[i];
      for (int it = 0; it < 60 && hi - lo > 1e-13 * (1.0 + hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        (det_at(mid) <= 0.0 ? hi : lo) = mid;
      }
      sys.first_conjugate_time = 0.5 * (lo + hi);
      break;
    }
    // even-multiplicity zeros: a deep local minimum that refines to ~0
    if (i < n_samp && sys.det_scaled[i] < sys.det_scaled[i - 1] &&
        sys.det_scaled[i] < sys.det_scaled[i + 1] &&
        sys.det_scaled[i] < 1e-4 * running_max) {
      double min_val = 0.0;
      const double t_min = golden_min(sys.t[i - 1], sys.t[i + 1], &min_val);
      if (min_val <= 1e-9 * running_max) {
        sys.conjugate_point = true;
        sys.first_conjugate_time = t_min;
      }
    }
  }
  return sys;
}

}  // namespace

Eigen::MatrixXd JacobiSystem::Q(std::size_t i) const {
  return P[i].partialPivLu().solve(Pprime[i]);
}

double JacobiSystem::trace_Q_reduced(std::size_t i) const {
  Eigen::MatrixXd M = Pprime[i];
  if (block_m > 0 && t[i] > 0.0) {
    M.rightCols(block_m) -= P[i].rightCols(block_m) / t[i];
  }
  return P[i].partialPivLu().solve(M).trace();
}

std::size_t JacobiSystem::first_eval_index(double t0_eval) const {
  std::size_t i = 0;
  while (i + 1 < t.size() && t[i] < t0_eval) ++i;
  return i;
}

JacobiSystem propagate_jacobi(const JacobiInit& init, const CurvatureMatrixFn& S,
                              double t_max, int block_m,
                              const JacobiOptions& opts) {
  const int k = static_cast<int>(init.P0.rows());
  if (init.P0.cols() != k || init.P0prime.rows() != k ||
      init.P0prime.cols() != k) {
    throw Error("propagate_jacobi: inconsistent initial matrices");
  }

  Eigen::VectorXd y0(2 * k * k);
  flatten(init.P0, init.P0prime, y0, 0);

  num::OdeRhs rhs = [k, &S](double t, const Eigen::VectorXd& y,
                            Eigen::VectorXd& dy) {
    const Unflat u(y, 0, k);
    dy.resize(2 * k * k);
    Eigen::Map<Eigen::MatrixXd>(dy.data(), k, k) = u.Pp;
    Eigen::Map<Eigen::MatrixXd>(dy.data() + k * k, k, k) = -u.P * S(t);
  };

  num::OdeOptions oo;
  oo.abs_tol = oo.rel_tol = opts.tol;
  const num::Dopri5 ode(oo);
  const num::OdeSolution sol = ode.integrate(rhs, 0.0, t_max, y0);
  return sample_system(sol, S, init, t_max, block_m, opts, 0);
}

Eigen::MatrixXd adapted_curvature_matrix(const models::WarpedModel& model,
                                         double rho, double drho, double c,
                                         double L) {
  const int k = model.dim;
  const double r = std::abs(rho);
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(k, k);
  if (c == 0.0) return S;
  const double k_rad = model.curvature_radial(std::max(r, 1e-10));
  const double k_tan = model.curvature_tangential(std::max(r, 1e-10));
  const double a = drho / c;
  const double phi = model.profile.phi(std::max(r, 1e-10));
  const double b = L == 0.0 ? 0.0 : L / (phi * c);
  const double c2 = c * c;
  // frame order: in-plane normal, off-plane sphere directions, tangent last
  S(0, 0) = c2 * k_rad;
  const double mixed = c2 * (a * a * k_rad + b * b * k_tan);
  for (int i = 1; i < k - 1; ++i) S(i, i) = mixed;
  return S;
}

JacobiSystem propagate_jacobi_along(const models::WarpedModel& model,
                                    const PolarPoint& x, const TangentVector& v,
                                    double t_max, const JacobiInit& init,
                                    const Eigen::MatrixXd& frame, int block_m,
                                    const JacobiOptions& opts) {
  const int k = static_cast<int>(init.P0.rows());
  if (k != model.dim && frame.rows() != k) {
    throw Error("propagate_jacobi_along: frame/system dimension mismatch");
  }
  const double speed = v.norm();
  const bool radial = v.spherical < 1e-14 * speed || x.r < 1e-14;
  const double L = radial ? 0.0 : model.profile.phi(x.r) * v.spherical;

  if (radial && v.radial < 0.0 && x.r + t_max * v.radial < 1e-10) {
    throw Error(
        "propagate_jacobi_along: radial geodesic reaches the pole; Jacobi "
        "propagation through the pole is not supported");
  }

  const bool id_frame = frame.size() == 0 || frame.isIdentity(1e-14);
  const auto S_caller = [&](double rho, double drho) {
    Eigen::MatrixXd S = adapted_curvature_matrix(model, rho, drho, speed, L);
    if (!id_frame) S = frame.transpose() * S * frame;
    return S;
  };

  // joint state: (rho, v_rho, psi, vec P, vec P')
  Eigen::VectorXd y0(3 + 2 * k * k);
  y0[0] = x.r;
  y0[1] = v.radial;
  y0[2] = 0.0;
  flatten(init.P0, init.P0prime, y0, 3);

  num::OdeRhs rhs = [&](double, const Eigen::VectorXd& y, Eigen::VectorXd& dy) {
    const double rho = y[0];
    const double phi = model.profile.phi(std::max(std::abs(rho), 1e-12));
    const double dphi = model.profile.dphi(std::abs(rho));
    dy.resize(3 + 2 * k * k);
    dy[0] = y[1];
    dy[1] = L == 0.0 ? 0.0 : dphi * L * L / (phi * phi * phi);
    dy[2] = L == 0.0 ? 0.0 : L / (phi * phi);
    const Unflat u(y, 3, k);
    Eigen::Map<Eigen::MatrixXd>(dy.data() + 3, k, k) = u.Pp;
    Eigen::Map<Eigen::MatrixXd>(dy.data() + 3 + k * k, k, k) =
        -u.P * S_caller(rho, y[1]);
  };

  num::OdeOptions oo;
  oo.abs_tol = oo.rel_tol = opts.tol;
  const num::Dopri5 ode(oo);
  const num::OdeSolution sol = ode.integrate(rhs, 0.0, t_max, y0);

  // curvature along the solved geodesic for the sampling pass
  const auto S_of_t = [&](double t) {
    const Eigen::VectorXd y = sol.eval(std::min(t, sol.t_end()));
    return S_caller(y[0], y[1]);
  };
  return sample_system(sol, S_of_t, init, t_max, block_m, opts, 3);
}

TraceBoundReport riccati_trace_bound(const JacobiSystem& sys, double c) {
  TraceBoundReport rep;
  const std::size_t i0 = sys.first_eval_index();
  const double n = static_cast<double>(sys.block_n);
  rep.initial_trace = sys.trace_Q_reduced(i0);
  rep.initial_ok = rep.initial_trace <= n * c + 1e-6;
  rep.min_margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = i0; i < sys.t.size(); ++i) {
    if (sys.det_scaled[i] <= 0.0) break;
    const double bound = n * c / (1.0 + sys.t[i] * c);
    const double margin = bound - sys.trace_Q_reduced(i);
    rep.margins.push_back(margin);
    if (margin < rep.min_margin) {
      rep.min_margin = margin;
      rep.argmin_t = sys.t[i];
    }
  }
  return rep;
}

MonotonicityReport jacobian_ratio_monotone(const JacobiSystem& sys, double c) {
  MonotonicityReport rep;
  const double n = static_cast<double>(sys.block_n);
  rep.rho.resize(sys.t.size());
  for (std::size_t i = 0; i < sys.t.size(); ++i) {
    rep.rho[i] = sys.det_scaled[i] * std::pow(1.0 + sys.t[i] * c, -n);
  }
  rep.rho_initial = rep.rho.front();
  rep.rho_final = rep.rho.back();
  for (std::size_t i = 0; i + 1 < rep.rho.size(); ++i) {
    rep.max_forward_increase =
        std::max(rep.max_forward_increase, rep.rho[i + 1] - rep.rho[i]);
  }
  return rep;
}

double index_form(const JacobiSystem& sys,
                  const std::vector<Eigen::VectorXd>& Z,
                  const std::vector<Eigen::VectorXd>& Zdot,
                  double hessian_term) {
  if (Z.size() != sys.t.size() || Zdot.size() != sys.t.size()) {
    throw Error("index_form: vector field grid does not match the system grid");
  }
  if (Z.back().norm() > 1e-10) {
    throw Error("index_form: Z must vanish at the far endpoint");
  }
  std::vector<double> integrand(sys.t.size());
  for (std::size_t i = 0; i < sys.t.size(); ++i) {
    integrand[i] = Zdot[i].squaredNorm() - Z[i].dot(sys.S[i] * Z[i]);
  }
  const double dt = sys.t[1] - sys.t[0];
  return hessian_term + num::simpson_uniform(integrand, dt);
}

}  // namespace geosob::geodesy
