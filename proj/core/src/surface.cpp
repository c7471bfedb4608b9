#include "geosob/submanifold/surface.hpp"

#include <cmath>

#include "geosob/errors.hpp"
#include "geosob/num/gauss.hpp"
#include "geosob/num/interp.hpp"
#include "geosob/num/quadrature.hpp"
#include "geosob/num/rng.hpp"
#include "geosob/potential/solver.hpp"

namespace geosob::submanifold {

potential::ChartMetric patch_chart_metric(const ImmersedPatch& patch) {
  if (patch.is_warped_slice()) {
    // the slice is intrinsically the 2-d warped sub-model
    models::WarpedModel sub;
    sub.dim = 2;
    sub.profile = patch.warped_ambient->profile;
    sub.curvature_class = patch.warped_ambient->curvature_class;
    sub.theta = patch.warped_ambient->profile.asymptotic_slope;
    return potential::warped_chart(sub);
  }
  potential::ChartMetric m;
  m.flat = false;
  const ImmersedPatch* p = &patch;
  auto patch_copy = std::make_shared<ImmersedPatch>(patch);
  m.G = [patch_copy](const Eigen::Vector2d& xi) {
    const auto d1 = patch_copy->dF(xi);
    Eigen::Matrix2d g;
    g(0, 0) = d1[0].dot(d1[0]);
    g(0, 1) = g(1, 0) = d1[0].dot(d1[1]);
    g(1, 1) = d1[1].dot(d1[1]);
    return g;
  };
  const auto Gfn = m.G;
  m.dG = [Gfn](const Eigen::Vector2d& xi) {
    // 4th-order central differences of the analytic metric
    const double h = 1e-4;
    std::array<Eigen::Matrix2d, 2> d;
    for (int c = 0; c < 2; ++c) {
      Eigen::Vector2d e = Eigen::Vector2d::Zero();
      e[c] = h;
      d[c] = (8.0 * (Gfn(xi + e) - Gfn(xi - e)) -
              (Gfn(xi + 2 * e) - Gfn(xi - 2 * e))) /
             (12.0 * h);
    }
    return d;
  };
  (void)p;
  return m;
}

namespace {

SurfaceSolution curve_potential(const ImmersedPatch& patch,
                                const SurfaceDensity& f) {
  if (!f.is_constant || std::abs(f.value({0, 0}) - 1.0) > 1e-12) {
    throw Error("surface_potential with n = 1 supports only f = 1");
  }
  const double t0 = patch.domain.a0, t1 = patch.domain.a1;
  const bool closed = patch.domain.closed_curve;

  const auto speed = [&patch](double t) {
    return std::sqrt(extrinsic_geometry(patch, {t, 0.0}).g(0, 0));
  };
  const auto curv = [&patch](double t) {
    return extrinsic_geometry(patch, {t, 0.0}).H_norm;
  };
  const auto flux_src = [&](double t) { return (1.0 - curv(t)) * speed(t); };

  const int N = 1024;
  const double dt = (t1 - t0) / N;
  std::vector<double> ts(N + 1), sigma(N + 1), Hmag(N + 1), I(N + 1), dI(N + 1);
  for (int i = 0; i <= N; ++i) {
    ts[i] = t0 + dt * i;
    sigma[i] = speed(ts[i]);
    Hmag[i] = curv(ts[i]);
    dI[i] = (1.0 - Hmag[i]) * sigma[i];
  }
  I[0] = 0.0;
  double L = 0.0, totH = 0.0;
  for (int i = 1; i <= N; ++i) {
    I[i] = I[i - 1] + num::integrate_value(flux_src, ts[i - 1], ts[i], 1e-14, 1e-12);
    L += num::integrate_value(speed, ts[i - 1], ts[i], 1e-14, 1e-12);
    totH += num::integrate_value([&](double t) { return curv(t) * speed(t); },
                                 ts[i - 1], ts[i], 1e-14, 1e-12);
  }
  const double expected = closed ? 0.0 : 2.0;
  if (std::abs((L - totH) - expected) > 1e-6 * (1.0 + L)) {
    throw Error("surface_potential: curve is not normalized (L - int|H| = " +
                std::to_string(L - totH) + ")");
  }

  auto I_spl = std::make_shared<num::HermiteSpline>(ts, I, dI);
  double c_bd;
  if (closed) {
    const double mean = num::integrate_value(
        [&](double t) { return I_spl->eval(t) * speed(t); }, t0, t1, 1e-13,
        1e-11);
    c_bd = -mean / L;
  } else {
    c_bd = -1.0;
  }

  const auto us_fn = [&](double t) { return c_bd + I_spl->eval(t); };
  std::vector<double> uvals(N + 1), us(N + 1), du_dt(N + 1);
  for (int i = 0; i <= N; ++i) {
    us[i] = us_fn(ts[i]);
    du_dt[i] = us[i] * sigma[i];
  }
  uvals[0] = 0.0;
  for (int i = 1; i <= N; ++i) {
    uvals[i] = uvals[i - 1] +
               num::integrate_value(
                   [&](double t) { return us_fn(t) * speed(t); }, ts[i - 1],
                   ts[i], 1e-14, 1e-12);
  }
  auto u_pre = std::make_shared<num::HermiteSpline>(ts, uvals, du_dt);
  const double umean =
      num::integrate_value(
          [&](double t) { return u_pre->eval(t) * speed(t); }, t0, t1, 1e-13,
          1e-11) /
      L;
  for (auto& v : uvals) v -= umean;

  auto sigma_spl = std::make_shared<num::HermiteSpline>(ts, sigma, [&] {
    std::vector<double> ds(N + 1);
    for (int i = 0; i <= N; ++i) {
      const int lo = std::max(0, i - 1), hi = std::min(N, i + 1);
      ds[i] = (sigma[hi] - sigma[lo]) / ((hi - lo) * dt);
    }
    return ds;
  }());
  std::vector<double> dus_dt = dI;
  auto u_spl = std::make_shared<num::HermiteSpline>(ts, uvals, du_dt);
  auto us_spl = std::make_shared<num::HermiteSpline>(ts, us, dus_dt);
  auto H_spl = std::make_shared<num::HermiteSpline>(ts, Hmag, [&] {
    std::vector<double> dH(N + 1);
    for (int i = 0; i <= N; ++i) {
      const int lo = std::max(0, i - 1), hi = std::min(N, i + 1);
      dH[i] = (Hmag[hi] - Hmag[lo]) / ((hi - lo) * dt);
    }
    return dH;
  }());

  SurfaceSolution sol;
  sol.n = 1;
  sol.u = [u_spl](const Eigen::Vector2d& xi) { return u_spl->eval(xi.x()); };
  sol.grad_param = [us_spl, sigma_spl](const Eigen::Vector2d& xi) {
    // du/dt = (du/ds) sigma
    return Eigen::Vector2d(us_spl->eval(xi.x()) * sigma_spl->eval(xi.x()), 0.0);
  };
  sol.hess_cov = [H_spl, sigma_spl](const Eigen::Vector2d& xi) {
    // covariant D^2u(dt,dt) = u_ss sigma^2 with u_ss = 1 - |H|
    Eigen::Matrix2d h = Eigen::Matrix2d::Zero();
    const double s = sigma_spl->eval(xi.x());
    h(0, 0) = (1.0 - H_spl->eval(xi.x())) * s * s;
    return h;
  };
  sol.residual_neumann = closed ? 0.0 : std::abs(us.back() - 1.0);
  sol.residual_interior = 0.0;
  return sol;
}

SurfaceSolution disk_closed_form(const ImmersedPatch& patch,
                                 const SurfaceDensity& f) {
  const double fv = f.value({0, 0});
  SurfaceSolution sol;
  sol.n = 2;
  sol.u = [fv](const Eigen::Vector2d& xi) { return 0.5 * fv * xi.squaredNorm(); };
  sol.grad_param = [fv](const Eigen::Vector2d& xi) {
    return (fv * xi).eval();
  };
  sol.hess_cov = [fv](const Eigen::Vector2d&) {
    return (fv * Eigen::Matrix2d::Identity()).eval();
  };
  const double R = patch.domain.R;
  sol.residual_neumann = std::abs(fv * R - 1.0);
  if (sol.residual_neumann > 1e-9) {
    throw Error("surface_potential: flat-disk density not normalized");
  }
  return sol;
}

SurfaceSolution slice_closed_form(const ImmersedPatch& patch,
                                  const SurfaceDensity& f) {
  models::WarpedModel sub;
  sub.dim = 2;
  sub.profile = patch.warped_ambient->profile;
  sub.curvature_class = patch.warped_ambient->curvature_class;
  sub.theta = sub.profile.asymptotic_slope;

  potential::RadialDensity rf = potential::constant_density();
  rf.scale = f.value({0, 0});
  const auto D = potential::GeoDomain::ball(patch.domain.R);
  auto sol2 = std::make_shared<potential::RadialPotential>(sub, rf, 0.0,
                                                           patch.domain.R);
  if (sol2->residual_neumann() > 1e-9) {
    throw Error("surface_potential: slice density not normalized");
  }
  auto prof = std::make_shared<models::WarpedProfile>(sub.profile);

  SurfaceSolution sol;
  sol.n = 2;
  sol.u = [sol2](const Eigen::Vector2d& xi) { return sol2->u(xi.norm()); };
  sol.grad_param = [sol2](const Eigen::Vector2d& xi) -> Eigen::Vector2d {
    const double r = xi.norm();
    if (r < 1e-12) return Eigen::Vector2d::Zero();
    return sol2->du(r) * xi / r;
  };
  sol.hess_cov = [sol2, prof](const Eigen::Vector2d& xi) -> Eigen::Matrix2d {
    const double r = xi.norm();
    if (r < 1e-9) {
      return sol2->d2u(0.0) * Eigen::Matrix2d::Identity();
    }
    const Eigen::Vector2d xh = xi / r;
    const Eigen::Matrix2d P = xh * xh.transpose();
    const double tang = sol2->du(r) * prof->phi(r) * prof->dphi(r) / (r * r);
    return sol2->d2u(r) * P + tang * (Eigen::Matrix2d::Identity() - P);
  };
  sol.residual_neumann = sol2->residual_neumann();
  sol.residual_interior = sol2->residual_interior();
  return sol;
}

}  // namespace

SurfaceSolution surface_potential(const ImmersedPatch& patch,
                                  const SurfaceDensity& f, SurfaceMethod method,
                                  double mesh_h) {
  if (patch.n == 1) return curve_potential(patch, f);
  if (patch.domain.kind != ParamDomain::Kind::disk) {
    throw Error("surface_potential: n = 2 solves need a disk parameter domain");
  }

  // normalization precondition
  {
    double lambda = 1.0;
    normalize_surface_density(patch, f, &lambda);
    if (std::abs(lambda - 1.0) > 1e-6) {
      throw Error("surface_potential: density not normalized (lambda = " +
                  std::to_string(lambda) + ")");
    }
  }

  const bool flat_disk = !patch.is_warped_slice() && f.is_constant &&
                         patch.name.rfind("flat_disk", 0) == 0;
  if (method == SurfaceMethod::automatic) {
    if (flat_disk) return disk_closed_form(patch, f);
    if (patch.is_warped_slice() && f.is_constant)
      return slice_closed_form(patch, f);
    method = SurfaceMethod::mesh;
  } else if (method == SurfaceMethod::closed_form) {
    if (flat_disk) return disk_closed_form(patch, f);
    if (patch.is_warped_slice() && f.is_constant)
      return slice_closed_form(patch, f);
    throw Error("surface_potential: no closed form for this patch");
  }

  const potential::ChartMetric metric = patch_chart_metric(patch);
  const potential::Mesh mesh = potential::disk_mesh(patch.domain.R, mesh_h, metric);

  auto patch_copy = std::make_shared<ImmersedPatch>(patch);
  potential::ChartField ff;
  ff.value = [f](const Eigen::Vector2d& xi) { return f.value(xi); };
  ff.grad = [f](const Eigen::Vector2d& xi) { return f.grad_param(xi); };
  const int n = patch.n;
  const auto rhs = [patch_copy, f, n](const Eigen::Vector2d& xi) {
    const PointGeometry geo = extrinsic_geometry(*patch_copy, xi);
    const double fv = f.value(xi);
    double grad2 = 0.0;
    if (!f.is_constant) {
      const Eigen::Vector2d df = f.grad_param(xi);
      grad2 = df.dot(geo.g_inv * df);
    }
    return n * std::pow(fv, double(n) / (n - 1)) -
           std::sqrt(grad2 + fv * fv * geo.H_norm * geo.H_norm);
  };
  const auto neumann = [f](const Eigen::Vector2d& xi) { return f.value(xi); };

  auto msol = std::make_shared<potential::MeshPotential>(
      potential::solve_mesh_weak(mesh, metric, ff, rhs, neumann));

  SurfaceSolution sol;
  sol.n = 2;
  sol.mesh = msol;
  sol.h = msol->h;
  sol.residual_interior = msol->residual_algebraic;
  sol.residual_neumann = msol->residual_neumann;
  sol.u = [msol](const Eigen::Vector2d& xi) { return msol->value(xi); };
  sol.grad_param = [msol](const Eigen::Vector2d& xi) {
    return msol->gradient(xi);
  };
  sol.hess_cov = [msol](const Eigen::Vector2d& xi) {
    return msol->hessian_covariant(xi);
  };
  return sol;
}

SurfaceLaplacianMargin surface_laplacian_margin(const ImmersedPatch& patch,
                                                const SurfaceSolution& sol,
                                                const SurfaceDensity& f,
                                                int y_samples,
                                                std::uint64_t seed) {
  SurfaceLaplacianMargin rep;
  rep.min_margin = std::numeric_limits<double>::infinity();
  const int n = patch.n;
  const int m = patch.codim();
  num::Philox rng(seed, 11);

  for (const auto& node : patch.interior_quadrature(n == 1 ? 64 : 16)) {
    const PointGeometry geo = extrinsic_geometry(patch, node.xi);
    const Eigen::Vector2d du = sol.grad_param(node.xi).head(2);
    Eigen::VectorXd dun = du.head(n);
    const double grad2 = dun.dot(geo.g_inv.topLeftCorner(n, n) * dun);
    if (grad2 >= 1.0) continue;
    const Eigen::Matrix2d H2 = sol.hess_cov(node.xi);
    const double lap =
        (geo.g_inv.topLeftCorner(n, n) * H2.topLeftCorner(n, n)).trace();
    const double bound = n * std::pow(f.value(node.xi), 1.0 / (n - 1 == 0 ? 1 : n - 1));
    const double ymax = std::sqrt(1.0 - grad2);
    for (int k = 0; k < y_samples; ++k) {
      Eigen::VectorXd y(m);
      for (int j = 0; j < m; ++j) y[j] = rng.normal();
      y *= (ymax * std::pow(rng.uniform(), 1.0 / m)) / (y.norm() + 1e-300);
      double Hy = 0.0;
      for (int beta = 0; beta < m; ++beta) Hy += geo.H[beta] * y[beta];
      const double margin = bound - (lap - Hy);
      if (margin < rep.min_margin) rep.min_margin = margin;
      ++rep.samples;
    }
  }
  return rep;
}

}  // namespace geosob::submanifold
