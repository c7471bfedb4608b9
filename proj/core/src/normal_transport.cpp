#include "geosob/submanifold/transport.hpp"

#include <Eigen/Dense>

#include <cmath>

#include "geosob/errors.hpp"
#include "geosob/num/quadrature.hpp"
#include "geosob/num/rng.hpp"

namespace geosob::submanifold {

using geodesy::JacobiInit;
using geodesy::JacobiOptions;
using geodesy::JacobiSystem;

namespace {

struct OnFrameData {
  Eigen::MatrixXd hess_on;       // D^2_Sigma u, orthonormal tangent frame
  std::vector<Eigen::MatrixXd> II_on;
  Eigen::VectorXd grad_on;       // grad^Sigma u components
  double grad2 = 0.0;
};

OnFrameData on_frame_data(const ImmersedPatch& patch, const SurfaceSolution& sol,
                          const PointGeometry& geo, const Eigen::Vector2d& xi) {
  const int n = patch.n;
  OnFrameData d;
  Eigen::MatrixXd g = geo.g.topLeftCorner(n, n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
  const Eigen::MatrixXd g_isqrt = es.operatorInverseSqrt();

  Eigen::VectorXd du = sol.grad_param(xi).head(n);
  d.grad_on = g_isqrt * du;  // = g^{-1/2} du
  d.grad2 = d.grad_on.squaredNorm();

  const Eigen::MatrixXd H2 = sol.hess_cov(xi).topLeftCorner(n, n);
  d.hess_on = g_isqrt * H2 * g_isqrt;
  d.II_on.reserve(geo.II.size());
  for (const auto& II : geo.II) {
    d.II_on.push_back(g_isqrt * II.topLeftCorner(n, n) * g_isqrt);
  }
  return d;
}

}  // namespace

NormalSample normal_transport(const ImmersedPatch& patch,
                              const SurfaceSolution& sol,
                              const SurfaceDensity& f,
                              const Eigen::Vector2d& xi,
                              const Eigen::VectorXd& y, double r,
                              double ode_tol) {
  const int n = patch.n;
  const int m = patch.codim();
  if (y.size() != m) throw Error("normal_transport: y must have codim entries");

  const PointGeometry geo = extrinsic_geometry(patch, xi);
  const OnFrameData d = on_frame_data(patch, sol, geo, xi);

  NormalSample out;
  out.speed2 = d.grad2 + y.squaredNorm();
  out.in_U = out.speed2 < 1.0;
  out.speed_scale = std::pow(f.value(xi), 1.0 / (n == 1 ? 1 : n - 1));
  out.bound_scaled = std::pow(1.0 + r * out.speed_scale, n);

  const int k = n + m;
  Eigen::MatrixXd P0 = Eigen::MatrixXd::Zero(k, k);
  P0.topLeftCorner(n, n).setIdentity();
  Eigen::MatrixXd P0p = Eigen::MatrixXd::Zero(k, k);
  Eigen::MatrixXd top = d.hess_on;
  for (int beta = 0; beta < m; ++beta) top -= y[beta] * d.II_on[beta];
  out.second_form = top;
  P0p.topLeftCorner(n, n) = top;
  for (int beta = 0; beta < m; ++beta) {
    P0p.block(0, n + beta, n, 1) = d.II_on[beta] * d.grad_on;
  }
  P0p.bottomRightCorner(m, m).setIdentity();

  {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
        Eigen::MatrixXd::Identity(n, n) + r * top);
    out.positivity_min_eig = es.eigenvalues().minCoeff();
  }

  JacobiInit init{P0, P0p};
  JacobiOptions jopts;
  jopts.tol = ode_tol;

  JacobiSystem sys;
  if (!patch.is_warped_slice()) {
    // Euclidean ambient: S = 0 along every geodesic
    const auto S0 = [k](double) { return Eigen::MatrixXd::Zero(k, k); };
    sys = geodesy::propagate_jacobi(init, S0, r, m, jopts);
  } else {
    const auto& model = *patch.warped_ambient;
    // tangent basis of the slice at xi: radial and circumferential; normals
    // are off-slice sphere directions. The geodesic plane is spanned by the
    // position direction and the normal-combination direction.
    const double s = xi.norm();
    if (s < 1e-9) {
      throw Error("normal_transport: slice transport from the pole is not "
                  "supported");
    }
    const Eigen::VectorXd du = sol.grad_param(xi);
    const double u_r = du.dot(xi) / s;  // radial derivative (|dr|=1)
    // for radial slice solutions the angular derivative vanishes
    const double ynorm = y.norm();
    const double c = std::sqrt(u_r * u_r + ynorm * ynorm);
    geodesy::PolarPoint x0;
    x0.r = s;
    x0.omega = Eigen::VectorXd::Unit(model.dim, 0);
    geodesy::TangentVector v;
    v.radial = u_r;
    v.spherical = ynorm;
    v.dir = Eigen::VectorXd::Unit(model.dim, 1);

    // caller frame -> adapted frame (in-plane normal, off-plane..., tangent)
    const double a = c > 0 ? u_r / c : 1.0;
    const double b = c > 0 ? ynorm / c : 0.0;
    const double chi = ynorm > 1e-14 ? std::atan2(y.size() > 1 ? y[1] : 0.0, y[0]) : 0.0;
    Eigen::MatrixXd R = Eigen::MatrixXd::Zero(k, k);
    // columns: e_r, e_psi(Sigma), nu_1, nu_2 in rows (n, o1, o2, T)
    R(0, 0) = -b;
    R(3, 0) = a;
    R(1, 1) = 1.0;
    R(0, 2) = a * std::cos(chi);
    R(2, 2) = -std::sin(chi);
    R(3, 2) = b * std::cos(chi);
    R(0, 3) = a * std::sin(chi);
    R(2, 3) = std::cos(chi);
    R(3, 3) = b * std::sin(chi);
    if (k != 4) {
      throw Error("normal_transport: warped slices support codim 2 only");
    }
    sys = geodesy::propagate_jacobi_along(model, x0, v, r, init, R, m, jopts);
  }

  if (sys.conjugate_point) {
    out.conjugate = true;
    out.first_conjugate_time = sys.first_conjugate_time;
    throw ConjugatePointError("normal_transport: conjugate point before r",
                              sys.first_conjugate_time);
  }
  out.det_scaled = sys.det_scaled.back();
  out.det_scaled_origin = sys.det_scaled.front();
  out.jacobian = out.det_scaled * std::pow(r, m);
  out.monotone_increase =
      geodesy::jacobian_ratio_monotone(sys, out.speed_scale).max_forward_increase;
  out.trace_margin =
      geodesy::riccati_trace_bound(sys, out.speed_scale).min_margin;
  return out;
}

SubContactVerdict contact_test(const ImmersedPatch& patch,
                               const SurfaceSolution& sol,
                               const Eigen::Vector2d& xi,
                               const Eigen::VectorXd& y, double r,
                               double contact_tolerance) {
  if (patch.is_warped_slice()) {
    throw Error("submanifold contact_test supports Euclidean ambients only");
  }
  const int n = patch.n;
  const PointGeometry geo = extrinsic_geometry(patch, xi);
  const OnFrameData d = on_frame_data(patch, sol, geo, xi);

  SubContactVerdict v;
  v.in_U = d.grad2 + y.squaredNorm() < 1.0;
  if (!v.in_U) return v;

  // ambient image point
  Eigen::VectorXd du = sol.grad_param(xi).head(n);
  Eigen::VectorXd grad_ambient =
      geo.tangent * (geo.g.topLeftCorner(n, n).ldlt().solve(du));
  Eigen::VectorXd p = patch.F(xi) + r * (grad_ambient + geo.normal * y);

  const double fbar =
      r * sol.u(xi) + 0.5 * r * r * (d.grad2 + y.squaredNorm());
  v.scale = std::max(1.0, std::abs(fbar));
  v.margin = std::numeric_limits<double>::infinity();
  for (const auto& node : patch.interior_quadrature(n == 1 ? 96 : 24)) {
    const double dist = (patch.F(node.xi) - p).norm();
    const double val = r * sol.u(node.xi) + 0.5 * dist * dist;
    v.margin = std::min(v.margin, val - fbar);
    ++v.probes;
  }
  v.is_contact = v.margin >= -contact_tolerance * v.scale;
  return v;
}

namespace {

double omega(int k) { return models::unit_ball_volume(k); }

}  // namespace

ShellReport shell_capture(const ImmersedPatch& patch,
                          const SurfaceSolution& sol, const SurfaceDensity& f,
                          double r, double sigma, long budget,
                          std::uint64_t seed) {
  if (sigma < 0.0 || sigma >= 1.0) {
    throw Error("shell_capture requires sigma in [0, 1)");
  }
  const int n = patch.n;
  const int m = patch.codim();
  ShellReport rep;
  rep.r = r;
  rep.sigma = sigma;
  rep.seed = seed;

  // RHS = (m/2) omega_m (1 - sigma^2) int_Omega r^m (1 + r f^{1/(n-1)})^n
  double omega_int = 0.0;   // int_Omega (1 + r c)^n dA
  double power_int = 0.0;   // int f^{n/(n-1)} dA
  for (const auto& node : patch.interior_quadrature()) {
    const PointGeometry geo = extrinsic_geometry(patch, node.xi);
    const Eigen::VectorXd du = sol.grad_param(node.xi).head(n);
    const double grad2 = du.dot(geo.g_inv.topLeftCorner(n, n) * du);
    const double fv = f.value(node.xi);
    power_int += node.w * geo.sqrt_det_g *
                 std::pow(fv, n == 1 ? 1.0 : double(n) / (n - 1));
    if (grad2 >= 1.0) continue;
    const double c = std::pow(fv, 1.0 / (n == 1 ? 1 : n - 1));
    omega_int += node.w * geo.sqrt_det_g * std::pow(1.0 + r * c, n);
  }
  rep.rhs = 0.5 * m * omega(m) * (1.0 - sigma * sigma) * std::pow(r, m) *
            omega_int;
  const int N_amb = n + m;
  const double theta =
      patch.is_warped_slice() ? patch.warped_ambient->theta : 1.0;
  rep.limit_lhs = N_amb * omega(N_amb) * theta;
  rep.limit_rhs = m * omega(m) * power_int;

  num::Philox rng(seed, 3);

  if (!patch.is_warped_slice()) {
    // point cloud of the patch for min/max distance tests
    std::vector<Eigen::VectorXd> cloud;
    for (const auto& node : patch.interior_quadrature(n == 1 ? 256 : 48)) {
      cloud.push_back(patch.F(node.xi));
    }
    for (const auto& node : patch.boundary_quadrature(64)) {
      cloud.push_back(patch.F(node.xi));
    }
    const Eigen::VectorXd anchor = cloud.front();
    const double ball_vol = omega(N_amb) * std::pow(r, N_amb);

    long hits = 0;
    std::uint64_t draw = 0;
    for (long i = 0; i < budget; ++i) {
      Eigen::VectorXd dir(N_amb);
      for (int j = 0; j < N_amb; ++j) dir[j] = rng.normal();
      dir.normalize();
      const double rho =
          r * std::pow(rng.uniform_at(1'000'000'000ull + draw++), 1.0 / N_amb);
      const Eigen::VectorXd p = anchor + rho * dir;
      double dmin = std::numeric_limits<double>::infinity(), dmax = 0.0;
      for (const auto& q : cloud) {
        const double dist = (q - p).norm();
        dmin = std::min(dmin, dist);
        dmax = std::max(dmax, dist);
      }
      if (dmax < r && dmin > sigma * r) ++hits;
    }
    const double p_hat = double(hits) / double(budget);
    rep.lhs_mc = ball_vol * p_hat;
    rep.lhs_stderr = ball_vol * std::sqrt(p_hat * (1.0 - p_hat) / double(budget));
  } else {
    const auto& model = *patch.warped_ambient;
    const double R = patch.domain.R;
    const double rho_hi = r + R;
    geodesy::DistanceOptions dopts;
    dopts.tol = 1e-8;
    dopts.scan = 16;
    dopts.bisect_iters = 36;

    const auto extreme = [&](double rho, double beta, bool want_max) {
      // golden search of s -> d((s), (rho)) at sphere angle beta over [0, R]
      const auto dist = [&](double s) {
        return geodesy::slice_distance(model, s, rho, beta, dopts);
      };
      const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
      double a = 0.0, b = R;
      double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
      double f1 = dist(x1), f2 = dist(x2);
      for (int it = 0; it < 24; ++it) {
        const bool move_right = want_max ? (f1 < f2) : (f1 > f2);
        if (move_right) {
          a = x1;
          x1 = x2;
          f1 = f2;
          x2 = a + gr * (b - a);
          f2 = dist(x2);
        } else {
          b = x2;
          x2 = x1;
          f2 = f1;
          x1 = b - gr * (b - a);
          f1 = dist(x1);
        }
      }
      const double interior = want_max ? std::max(f1, f2) : std::min(f1, f2);
      const double ends =
          want_max ? std::max(dist(0.0), dist(R)) : std::min(dist(0.0), dist(R));
      return want_max ? std::max(interior, ends) : std::min(interior, ends);
    };

    // radial inverse-CDF on the ambient volume density
    const int k = model.dim;
    std::vector<double> rs(257), V(257), dV(257);
    for (int i = 0; i <= 256; ++i) {
      rs[i] = rho_hi * i / 256.0;
      dV[i] = std::pow(model.profile.phi(rs[i]), k - 1);
    }
    V[0] = 0.0;
    for (int i = 1; i <= 256; ++i) {
      V[i] = V[i - 1] + num::integrate_value(
                            [&](double s) {
                              return std::pow(model.profile.phi(s), k - 1);
                            },
                            rs[i - 1], rs[i], 1e-13, 1e-11);
    }
    num::HermiteSpline cdf(rs, V, dV);

    long hits = 0;
    for (long i = 0; i < budget; ++i) {
      const double target = rng.uniform_at(i) * V.back();
      double lo = 0.0, hi = rho_hi;
      for (int it = 0; it < 50; ++it) {
        const double mid = 0.5 * (lo + hi);
        (cdf.eval(mid) < target ? lo : hi) = mid;
      }
      const double rho = 0.5 * (lo + hi);
      Eigen::VectorXd dir(k);
      for (int j = 0; j < k; ++j) dir[j] = rng.normal();
      dir.normalize();
      const double plane = std::hypot(dir[0], dir[1]);
      const double delta = std::acos(std::clamp(plane, 0.0, 1.0));
      const double dmax = extreme(rho, M_PI - delta, true);
      if (dmax >= r) continue;
      const double dmin = extreme(rho, delta, false);
      if (dmin > sigma * r) ++hits;
    }
    const double bracket = models::ball_volume(model, rho_hi);
    const double p_hat = double(hits) / double(budget);
    rep.lhs_mc = bracket * p_hat;
    rep.lhs_stderr = bracket * std::sqrt(p_hat * (1.0 - p_hat) / double(budget));
  }

  rep.slack = rep.rhs - rep.lhs_mc;
  if (rep.lhs_mc <= rep.rhs + 3.0 * rep.lhs_stderr) {
    rep.status = rep.lhs_stderr > 0.1 * rep.rhs ? "inconclusive" : "pass";
  } else if (rep.lhs_stderr > 0.05 * rep.rhs) {
    rep.status = "inconclusive";
  } else {
    rep.status = "fail";
  }
  return rep;
}

}  // namespace geosob::submanifold
