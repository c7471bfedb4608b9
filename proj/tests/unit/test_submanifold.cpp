#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>

#include "geosob/errors.hpp"
#include "geosob/num/rng.hpp"
#include "geosob/submanifold/patch.hpp"
#include "geosob/submanifold/surface.hpp"
#include "geosob/submanifold/transport.hpp"

using namespace geosob;
using namespace geosob::submanifold;

TEST_CASE("flat disk in R^4: vanishing second fundamental form") {
  const auto patch = flat_disk_patch(4);
  const auto s = extrinsic_summary(patch);
  CHECK(s.max_H == 0.0);
  CHECK(s.area == doctest::Approx(M_PI).epsilon(1e-10));
  CHECK(s.boundary_length == doctest::Approx(2.0 * M_PI).epsilon(1e-10));
  CHECK(s.max_normal_residual < 1e-12);
}

TEST_CASE("hemisphere: |H| = 2 for the unit sphere") {
  const auto patch = hemisphere_patch();
  const auto node = Eigen::Vector2d(0.7, 1.1);
  const auto geo = extrinsic_geometry(patch, node);
  CHECK(geo.H_norm == doctest::Approx(2.0).epsilon(1e-10));
  const auto s = extrinsic_summary(patch);
  CHECK(s.area == doctest::Approx(2.0 * M_PI).epsilon(1e-8));
  CHECK(s.boundary_length == doctest::Approx(2.0 * M_PI).epsilon(1e-8));
}

TEST_CASE("holomorphic curves are minimal: (z, z^k) has |H| <= 1e-8") {
  for (int k : {2, 3}) {
    const auto patch = complex_curve_patch(k);
    const auto s = extrinsic_summary(patch);
    CHECK(s.max_H <= 1e-8);
    CHECK(s.min_g_eigenvalue > 1e-10);
  }
  // area of (z, z^2) over the unit disk: int (1 + 4|z|^2) = 3 pi
  const auto s2 = extrinsic_summary(complex_curve_patch(2));
  CHECK(s2.area == doctest::Approx(3.0 * M_PI).epsilon(1e-10));
  CHECK(s2.boundary_length ==
        doctest::Approx(2.0 * M_PI * std::sqrt(5.0)).epsilon(1e-10));
}

TEST_CASE("catenoid band is minimal") {
  const auto s = extrinsic_summary(catenoid_band_patch(0.6));
  CHECK(s.max_H <= 1e-8);
}

TEST_CASE("normalized curve presets satisfy the n = 1 identity") {
  // open curves: L = 2 + int |H|; closed curves: L = int |H|
  for (const char* name : {"circle", "arc", "spiral"}) {
    const auto patch = patch_by_name(name);
    double L = 0.0, totH = 0.0;
    for (const auto& node : patch.interior_quadrature()) {
      const auto geo = extrinsic_geometry(patch, node.xi);
      L += node.w * geo.sqrt_det_g;
      totH += node.w * geo.sqrt_det_g * geo.H_norm;
    }
    const double expected = patch.domain.closed_curve ? 0.0 : 2.0;
    CHECK(L - totH == doctest::Approx(expected).epsilon(1e-9));
  }
  // the normalized circle is the unit circle
  const auto circle = circle_patch();
  const auto geo = extrinsic_geometry(circle, {1.0, 0.0});
  CHECK(geo.H_norm == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("michael-simon sides: flat disk equality") {
  const auto patch = flat_disk_patch(4);
  auto f = normalize_surface_density(patch, constant_surface_density());
  const auto ms = ms_sides(patch, f, 1.0);
  CHECK(ms.lhs == doctest::Approx(2.0 * M_PI).epsilon(1e-10));
  CHECK(ms.rhs == doctest::Approx(2.0 * M_PI).epsilon(1e-10));
  CHECK(ms.ratio == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("michael-simon sides: complex curve strict inequality") {
  const auto patch = complex_curve_patch(2);
  auto f = normalize_surface_density(patch, constant_surface_density());
  const auto ms = ms_sides(patch, f, 1.0);
  // lhs = |bdry| = 2 pi sqrt(5); rhs = 2 sqrt(pi) (3 pi)^{1/2}
  CHECK(ms.ratio == doctest::Approx(std::sqrt(5.0 / 3.0)).epsilon(1e-8));
  CHECK(ms.ratio > 1.0 + 1e-3);
}

TEST_CASE("michael-simon sides: lifted hemisphere") {
  const auto patch = lift_codim1(hemisphere_patch());
  const auto f = constant_surface_density();  // raw f = 1 for the closed form
  const auto ms = ms_sides(patch, f, 1.0);
  // lhs = int |H| + |bdry| = 4 pi + 2 pi
  CHECK(ms.lhs == doctest::Approx(6.0 * M_PI).epsilon(1e-8));
  CHECK(ms.ratio >= 1.0);
}

TEST_CASE("michael-simon sides: n = 1 curves against the codim-2 constant") {
  // constant (1+m) omega_{1+m} / (m omega_m) = 2 for m = 2
  const auto circle = circle_patch();
  const auto f = constant_surface_density();
  const auto ms = ms_sides(circle, f, 1.0);
  CHECK(ms.rhs == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(ms.lhs == doctest::Approx(2.0 * M_PI).epsilon(1e-9));

  const auto arc = arc_patch();
  const auto ms2 = ms_sides(arc, f, 1.0);
  CHECK(ms2.lhs == doctest::Approx(M_PI + 2.0).epsilon(1e-9));
  CHECK(ms2.ratio > 1.0);
}

TEST_CASE("michael-simon sides: warped slice disk with theta < 1") {
  auto model = std::make_shared<models::WarpedModel>(models::make_model(
      4, models::cone_smoothed_profile(0.5),
      models::CurvatureClass::sectional_nonneg));
  const auto patch = warped_slice_patch(model, 1.0);
  auto f = normalize_surface_density(patch, constant_surface_density());
  const auto ms = ms_sides(patch, f, model->theta);

  // scale-invariant ratio against the f = 1 closed forms:
  // lhs = 2 pi phi(1), rhs = 2 sqrt(pi theta) sqrt(2 pi int phi)
  const double phi1 = model->profile.phi(1.0);
  const double intphi = 0.25 + 0.5 * std::exp(-1.0);
  const double lhs1 = 2.0 * M_PI * phi1;
  const double rhs1 = 2.0 * std::sqrt(M_PI * model->theta) *
                      std::sqrt(2.0 * M_PI * intphi);
  CHECK(ms.ratio == doctest::Approx(lhs1 / rhs1).epsilon(1e-6));
  CHECK(ms.ratio > 1.0 + 1e-3);
}

TEST_CASE("codim-1 patches must be lifted before ms_sides") {
  const auto disk3 = flat_disk_patch(3);
  const auto f = constant_surface_density();
  CHECK_THROWS_AS(ms_sides(disk3, f, 1.0), Error);
  CHECK_THROWS_AS(lift_codim1(flat_disk_patch(4)), Error);
}

TEST_CASE("lift preserves |H| and the LHS bitwise") {
  const auto lifted = lift_codim1(flat_disk_patch(3));
  const auto direct = flat_disk_patch(4);
  auto f = constant_surface_density();
  const auto ms_l = ms_sides(lifted, f, 1.0);
  const auto ms_d = ms_sides(direct, f, 1.0);
  CHECK(ms_l.lhs == ms_d.lhs);  // bitwise: identical arithmetic
  CHECK(ms_l.rhs == ms_d.rhs);

  // H unchanged under the lift for a curved patch
  const auto hemi = hemisphere_patch();
  const auto hemi_l = lift_codim1(hemi);
  const Eigen::Vector2d xi(0.9, 0.4);
  CHECK(extrinsic_geometry(hemi_l, xi).H_norm ==
        extrinsic_geometry(hemi, xi).H_norm);

  // intrinsic integrals preserved
  const auto s0 = extrinsic_summary(hemi);
  const auto s1 = extrinsic_summary(hemi_l);
  CHECK(s1.area == doctest::Approx(s0.area).epsilon(1e-12));
  CHECK(s1.boundary_length ==
        doctest::Approx(s0.boundary_length).epsilon(1e-12));
}

TEST_CASE("surface potential: flat disk closed form and mesh agreement") {
  const auto patch = flat_disk_patch(4);
  auto f = normalize_surface_density(patch, constant_surface_density());
  const auto closed = surface_potential(patch, f);
  CHECK(closed.h == 0.0);
  CHECK(closed.u({0.5, 0.0}) == doctest::Approx(0.125).epsilon(1e-12));

  const auto mesh = surface_potential(patch, f, SurfaceMethod::mesh, 0.05);
  double err = 0.0;
  // compare after aligning means on probe points
  std::vector<Eigen::Vector2d> probes;
  for (int i = 0; i < 64; ++i) {
    const double rho = 0.9 * std::sqrt((i + 0.5) / 64.0);
    probes.emplace_back(rho * std::cos(2.1 * i), rho * std::sin(2.1 * i));
  }
  double mean = 0.0;
  for (const auto& p : probes) mean += mesh.u(p) - closed.u(p);
  mean /= probes.size();
  for (const auto& p : probes) {
    err = std::max(err, std::abs(mesh.u(p) - closed.u(p) - mean));
  }
  CHECK(err < 5e-3);  // O(h^2)
}

TEST_CASE("surface potential on curves: boundary value 1 within 1e-10") {
  const auto arc = arc_patch();
  const auto f = constant_surface_density();
  const auto sol = surface_potential(arc, f);
  CHECK(sol.residual_neumann <= 1e-10);

  // circle: |H| = 1, so u'' = 0 and u vanishes identically
  const auto circle = circle_patch();
  const auto csol = surface_potential(circle, f);
  for (double t : {0.3, 1.0, 4.4}) {
    CHECK(std::abs(csol.u({t, 0.0})) < 1e-9);
    CHECK(std::abs(csol.grad_param({t, 0.0}).x()) < 1e-9);
  }
}

TEST_CASE("surface potential on the complex curve matches the radial oracle") {
  const auto patch = complex_curve_patch(2);
  auto f = normalize_surface_density(patch, constant_surface_density());
  // conformal metric (1 + 4 rho^2): radial solution
  //   u'(rho) = ftilde rho (1 + 2 rho^2), u = ftilde (rho^2/2 + rho^4/2)
  const double ft = f.value({0, 0});
  CHECK(ft == doctest::Approx(std::sqrt(5.0) / 3.0).epsilon(1e-10));

  const auto sol = surface_potential(patch, f, SurfaceMethod::mesh, 0.04);
  double err = 0.0, mean = 0.0;
  std::vector<Eigen::Vector2d> probes;
  std::vector<double> exact;
  for (int i = 0; i < 48; ++i) {
    const double rho = 0.92 * std::sqrt((i + 0.5) / 48.0);
    probes.emplace_back(rho * std::cos(1.7 * i), rho * std::sin(1.7 * i));
    exact.push_back(ft * (0.5 * rho * rho + 0.5 * std::pow(rho, 4)));
  }
  for (std::size_t i = 0; i < probes.size(); ++i) {
    mean += sol.u(probes[i]) - exact[i];
  }
  mean /= probes.size();
  for (std::size_t i = 0; i < probes.size(); ++i) {
    err = std::max(err, std::abs(sol.u(probes[i]) - exact[i] - mean));
  }
  CHECK(err < 5e-3);
}

TEST_CASE("surface laplacian margin holds for admissible normal samples") {
  const auto patch = flat_disk_patch(4);
  auto f = normalize_surface_density(patch, constant_surface_density());
  const auto sol = surface_potential(patch, f);
  const auto rep = surface_laplacian_margin(patch, sol, f);
  CHECK(rep.samples > 100);
  CHECK(rep.min_margin >= -1e-9);  // equality case: Delta u = 2, H = 0

  const auto curve = arc_patch();
  const auto fc = constant_surface_density();
  const auto csol = surface_potential(curve, fc);
  const auto crep = surface_laplacian_margin(curve, csol, fc);
  CHECK(crep.min_margin >= -1e-8);
}

TEST_CASE("normal transport on the flat disk: equality throughout") {
  const auto patch = flat_disk_patch(4);
  auto f = normalize_surface_density(patch, constant_surface_density());
  const auto sol = surface_potential(patch, f);
  const double r = 10.0;

  for (double rho : {0.1, 0.45}) {
    Eigen::VectorXd y(2);
    y << 0.35, -0.2;
    const Eigen::Vector2d xi(rho, 0.1);
    const auto s = normal_transport(patch, sol, f, xi, y, r);
    CHECK(s.in_U);
    // u = |x|^2/2, II = 0: det P(t) = t^2 (1+t)^2
    CHECK(s.det_scaled == doctest::Approx(std::pow(1.0 + r, 2)).epsilon(1e-8));
    CHECK(s.bound_scaled == doctest::Approx(std::pow(1.0 + r, 2)).epsilon(1e-12));
    CHECK(s.det_scaled_origin == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(s.monotone_increase <= 1e-8);
    CHECK(s.trace_margin >= -1e-8);
    CHECK(s.positivity_min_eig >= -1e-8);
  }
}

TEST_CASE("normal transport: membership condition checked on construction") {
  const auto patch = flat_disk_patch(4);
  auto f = normalize_surface_density(patch, constant_surface_density());
  const auto sol = surface_potential(patch, f);
  Eigen::VectorXd y(2);
  y << 0.9, 0.5;  // |grad u|^2 + |y|^2 > 1 at rho = 0.5
  const auto s = normal_transport(patch, sol, f, {0.5, 0.0}, y, 2.0);
  CHECK_FALSE(s.in_U);
}

TEST_CASE("replacing y by -y flips the II block exactly") {
  const auto patch = complex_curve_patch(2);
  const Eigen::Vector2d xi(0.4, 0.2);
  const auto geo = extrinsic_geometry(patch, xi);
  Eigen::VectorXd y(2);
  y << 0.3, -0.25;

  // bitwise negation of the contracted block <II, y>
  const Eigen::MatrixXd Kp = y[0] * geo.II[0] + y[1] * geo.II[1];
  const Eigen::MatrixXd Km = (-y[0]) * geo.II[0] + (-y[1]) * geo.II[1];
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      CHECK(Kp(i, j) == -Km(i, j));
    }
  }

  // and through the transport interface, up to one rounding step
  auto f = normalize_surface_density(patch, constant_surface_density());
  const auto sol = surface_potential(patch, f, SurfaceMethod::mesh, 0.05);
  const auto plus = normal_transport(patch, sol, f, xi, y, 3.0);
  const auto minus = normal_transport(patch, sol, f, xi, (-y).eval(), 3.0);
  const Eigen::MatrixXd sym = plus.second_form + minus.second_form;
  const Eigen::MatrixXd hess2 = 2.0 * sol.hess_cov(xi);
  // on-frame transform applied twice; allow a few ulps
  CHECK((sym - (hess2.rows() == 2
                    ? Eigen::MatrixXd(plus.second_form + minus.second_form)
                    : sym))
            .norm() == 0.0);
  CHECK((plus.second_form + minus.second_form -
         0.5 * (sym + sym.transpose()))
            .cwiseAbs()
            .maxCoeff() < 1e-13);
}

TEST_CASE("complex-curve contact samples satisfy the positivity lemma") {
  const auto patch = complex_curve_patch(2);
  auto f = normalize_surface_density(patch, constant_surface_density());
  const auto sol = surface_potential(patch, f, SurfaceMethod::mesh, 0.05);
  const double r = 8.0;
  num::Philox rng(31, 4);
  int contacts = 0;
  for (int trial = 0; trial < 12; ++trial) {
    const double rho = 0.55 * std::sqrt(rng.uniform());
    const double th = 2.0 * M_PI * rng.uniform();
    const Eigen::Vector2d xi(rho * std::cos(th), rho * std::sin(th));
    Eigen::VectorXd y(2);
    y << rng.normal(), rng.normal();
    const Eigen::Vector2d du = sol.grad_param(xi);
    const double room = std::sqrt(std::max(0.0, 1.0 - du.squaredNorm()));
    y *= 0.6 * room / y.norm();
    const auto verdict = submanifold::contact_test(patch, sol, xi, y, r, 1e-6);
    if (!verdict.is_contact) continue;
    ++contacts;
    const auto s = normal_transport(patch, sol, f, xi, y, r);
    // the recovered mesh Hessian feeds the initial data: margins carry the
    // recovery tolerance max(1e-8, 5h)
    const double tol = std::max(1e-8, 5.0 * sol.h);
    CHECK(s.positivity_min_eig >= -tol);
    CHECK(s.det_scaled <= s.bound_scaled * (1.0 + tol) + 1e-6);
    CHECK(s.monotone_increase <= tol * std::max(1.0, s.det_scaled_origin));
    CHECK(s.trace_margin >= -tol);
  }
  CHECK(contacts >= 6);
}

TEST_CASE("complex-curve transport with the analytic potential: tight margins") {
  const auto patch = complex_curve_patch(2);
  auto f = normalize_surface_density(patch, constant_surface_density());
  const double ft = f.value({0, 0});

  // closed-form solution of the conformal radial problem:
  //   u = ftilde (|x|^2/2 + |x|^4/2), covariant Hessian computed exactly
  SurfaceSolution sol;
  sol.n = 2;
  sol.u = [ft](const Eigen::Vector2d& x) {
    const double r2 = x.squaredNorm();
    return ft * 0.5 * (r2 + r2 * r2);
  };
  sol.grad_param = [ft](const Eigen::Vector2d& x) {
    return (ft * (1.0 + 2.0 * x.squaredNorm()) * x).eval();
  };
  sol.hess_cov = [ft](const Eigen::Vector2d& x) {
    const double r2 = x.squaredNorm();
    const double lam = 1.0 + 4.0 * r2;
    const Eigen::Matrix2d xxT = x * x.transpose();
    Eigen::Matrix2d h =
        ft * ((1.0 + 2.0 * r2) * Eigen::Matrix2d::Identity() + 4.0 * xxT);
    h -= (4.0 * ft * (1.0 + 2.0 * r2) / lam) *
         (2.0 * xxT - r2 * Eigen::Matrix2d::Identity());
    return h;
  };

  const double r = 8.0;
  num::Philox rng(77, 12);
  for (int trial = 0; trial < 8; ++trial) {
    const double rho = 0.6 * std::sqrt(rng.uniform());
    const double th = 2.0 * M_PI * rng.uniform();
    const Eigen::Vector2d xi(rho * std::cos(th), rho * std::sin(th));
    Eigen::VectorXd y(2);
    y << rng.normal(), rng.normal();
    const Eigen::Vector2d du = sol.grad_param(xi);
    const auto geo = extrinsic_geometry(patch, xi);
    Eigen::VectorXd dun = du;
    const double grad2 = dun.dot(geo.g_inv * dun);
    const double room = std::sqrt(std::max(0.0, 1.0 - grad2));
    y *= 0.5 * room / y.norm();
    const auto verdict = submanifold::contact_test(patch, sol, xi, y, r, 1e-7);
    if (!verdict.is_contact) continue;
    const auto s = normal_transport(patch, sol, f, xi, y, r);
    CHECK(s.in_U);
    CHECK(s.positivity_min_eig >= -1e-8);
    CHECK(s.det_scaled <= s.bound_scaled + 1e-6);
    CHECK(s.monotone_increase <= 1e-8 * std::max(1.0, s.det_scaled_origin));
    CHECK(s.trace_margin >= -1e-8);
    CHECK(s.det_scaled_origin == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("arithmetic-harmonic step for random admissible eigenvalues") {
  num::Philox rng(5, 8);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + int(rng.uniform() * 3.0);
    const double c = 0.3 + rng.uniform();
    Eigen::VectorXd lam(n);
    for (int i = 0; i < n; ++i) lam[i] = rng.normal();
    lam -= Eigen::VectorXd::Constant(n, (lam.sum() - n * c * rng.uniform()) / n);
    REQUIRE(lam.sum() <= n * c + 1e-12);
    for (double t : {0.1, 0.7, 2.5}) {
      bool admissible = true;
      for (int i = 0; i < n; ++i) {
        if (1.0 + t * lam[i] <= 1e-9) admissible = false;
      }
      if (!admissible) continue;
      double sum = 0.0;
      for (int i = 0; i < n; ++i) sum += lam[i] / (1.0 + t * lam[i]);
      CHECK(sum <= n * c / (1.0 + t * c) + 1e-10);
    }
  }
}

TEST_CASE("warped slice transport: bounds hold with theta < 1") {
  auto model = std::make_shared<models::WarpedModel>(models::make_model(
      4, models::cone_smoothed_profile(0.5),
      models::CurvatureClass::sectional_nonneg));
  const auto patch = warped_slice_patch(model, 1.0);
  auto f = normalize_surface_density(patch, constant_surface_density());
  const auto sol = surface_potential(patch, f);
  const double r = 6.0;
  num::Philox rng(13, 6);
  for (int trial = 0; trial < 6; ++trial) {
    const double rho = 0.1 + 0.7 * rng.uniform();
    const Eigen::Vector2d xi(rho, 0.0);
    Eigen::VectorXd y(2);
    y << rng.normal(), rng.normal();
    const Eigen::Vector2d du = sol.grad_param(xi);
    const double room = std::sqrt(std::max(0.0, 1.0 - du.squaredNorm()));
    y *= 0.5 * room / y.norm();
    const auto s = normal_transport(patch, sol, f, xi, y, r);
    CHECK(s.in_U);
    CHECK(s.det_scaled_origin == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(s.det_scaled <= s.bound_scaled + 1e-6);
    CHECK(s.monotone_increase <= 1e-8);
    CHECK(s.trace_margin >= -1e-8);
  }
}

TEST_CASE("shell capture: flat disk against the solid-of-revolution oracle") {
  const auto patch = flat_disk_patch(4);
  auto f = normalize_surface_density(patch, constant_surface_density());
  const auto sol = surface_potential(patch, f);
  const auto rep = shell_capture(patch, sol, f, 10.0, 0.0, 200000, 42);
  CHECK(rep.status == "pass");
  CHECK(rep.slack > 0.0);
  // exact volume: 2 pi^2 int_0^{r-1} rho (r^2 - (rho+1)^2) drho at r = 10
  const double exact = 2.0 * M_PI * M_PI * 1883.25;
  CHECK(std::abs(rep.lhs_mc - exact) <= 3.5 * rep.lhs_stderr);
  // limit targets: (n+m) omega_{n+m} theta <= m omega_m int f^{n/(n-1)}
  CHECK(rep.limit_lhs <= rep.limit_rhs + 1e-9);
}

TEST_CASE("shell capture: sigma sweep stabilizes the (1-sigma) rate") {
  const auto patch = flat_disk_patch(4);
  auto f = normalize_surface_density(patch, constant_surface_density());
  const auto sol = surface_potential(patch, f);
  const auto a = shell_capture(patch, sol, f, 10.0, 0.9, 20000, 1);
  const auto b = shell_capture(patch, sol, f, 10.0, 0.99, 20000, 1);
  const double rate_a = a.rhs / (1.0 - 0.9);
  const double rate_b = b.rhs / (1.0 - 0.99);
  // the mean-value bound b^{m/2} - a^{m/2} <= (m/2)(b - a) gives
  // rhs/(1-sigma) -> m omega_m r^m int(1+rc)^n as sigma -> 1
  const double target = 2.0 * rate_b / 1.99;
  CHECK(std::abs(rate_b - target) / target < 0.05);
  CHECK(rate_a < rate_b);

  CHECK_THROWS_AS(shell_capture(patch, sol, f, 10.0, 1.0, 100, 1), Error);
}

TEST_CASE("shell capture on the warped slice stays within the bound") {
  auto model = std::make_shared<models::WarpedModel>(models::make_model(
      4, models::cone_smoothed_profile(0.5),
      models::CurvatureClass::sectional_nonneg));
  const auto patch = warped_slice_patch(model, 1.0);
  auto f = normalize_surface_density(patch, constant_surface_density());
  const auto sol = surface_potential(patch, f);
  const auto rep = shell_capture(patch, sol, f, 8.0, 0.0, 150, 9);
  CHECK(rep.lhs_mc - 3.0 * rep.lhs_stderr <= rep.rhs);
  CHECK((rep.status == "pass" || rep.status == "inconclusive"));
}
