#include <doctest.h>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>

#include "geosob/errors.hpp"
#include "geosob/num/quadrature.hpp"
#include "geosob/num/rng.hpp"
#include "geosob/potential/solver.hpp"

using namespace geosob;
using models::CurvatureClass;
using potential::GeoDomain;

namespace {

models::WarpedModel euclid(int n = 2) {
  return models::make_model(n, models::euclidean_profile(),
                            CurvatureClass::sectional_nonneg);
}

models::WarpedModel cone2(double alpha = 0.5) {
  return models::make_model(2, models::cone_smoothed_profile(alpha),
                            CurvatureClass::sectional_nonneg);
}

}  // namespace

TEST_CASE("normalization: closed forms and idempotence") {
  const auto m2 = euclid(2);
  const auto D1 = GeoDomain::ball(1.0);
  potential::NormalizationReport rep;
  auto f = potential::normalize_density(potential::constant_density(), D1, m2,
                                        &rep);
  // f = 1 on the euclidean unit ball, n = 2: A = 2 pi, B = pi, lambda = 1
  CHECK(rep.lambda == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rep.residual <= 1e-9);

  // radius R: lambda = R^{-(n-1)}
  const auto m3 = euclid(3);
  const auto DR = GeoDomain::ball(2.5);
  potential::NormalizationReport rep3;
  potential::normalize_density(potential::constant_density(), DR, m3, &rep3);
  CHECK(rep3.lambda == doctest::Approx(std::pow(2.5, -2)).epsilon(1e-12));

  // idempotence
  potential::NormalizationReport rep2;
  auto f2 = potential::normalize_density(f, D1, m2, &rep2);
  CHECK(rep2.lambda == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(f2.scale == doctest::Approx(f.scale).epsilon(1e-12));
}

TEST_CASE("neumann compatibility identity after normalization") {
  // int_D (n f^{n/(n-1)} - |grad f|) = int_bdry f, by the divergence theorem
  const auto m = cone2(0.6);
  const auto D = GeoDomain::ball(1.4);
  auto f = potential::normalize_density(
      potential::radial_poly_density({2.0, 0.0, -1.0}), D, m);
  const int n = m.dim;
  const double coeff = n * models::unit_ball_volume(n);
  const double interior = coeff * num::integrate_value(
      [&](double s) {
        return (n * f.power(s, n) - f.grad_mag(s)) *
               std::pow(m.profile.phi(s), n - 1);
      },
      0.0, 1.4);
  const double boundary =
      f.value(1.4) * coeff * std::pow(m.profile.phi(1.4), n - 1);
  CHECK(interior == doctest::Approx(boundary).epsilon(1e-9));
}

TEST_CASE("euclidean ball with f = 1: u = r^2/2") {
  const auto m = euclid(2);
  const auto D = GeoDomain::ball(1.0);
  const auto f = potential::normalize_density(potential::constant_density(), D, m);
  const auto sol = potential::solve_radial(f, D, m);
  for (double r : {0.1, 0.33, 0.5, 0.77, 0.9999}) {
    CHECK(sol.du(r) == doctest::Approx(r).epsilon(1e-11));
    CHECK(sol.u(r) - sol.u(0.0) == doctest::Approx(0.5 * r * r).epsilon(1e-10));
    CHECK(sol.d2u(r) == doctest::Approx(1.0).epsilon(1e-10));
  }
  CHECK(sol.residual_neumann() <= 1e-9);
  CHECK(sol.residual_interior() <= 1e-9);

  const auto lap = potential::laplacian_bound_check(sol);
  CHECK(std::abs(lap.min_margin) <= 1e-9);  // equality: Delta u = n exactly
}

TEST_CASE("cone-smoothed ball: boundary derivative forced by normalization") {
  const auto m = cone2(0.5);
  const auto D = GeoDomain::ball(1.0);
  const auto f = potential::normalize_density(potential::constant_density(), D, m);
  const auto sol = potential::solve_radial(f, D, m);
  CHECK(std::abs(sol.du(1.0) - 1.0) <= 1e-9);
  CHECK(sol.residual_interior() <= 1e-9);
  CHECK(sol.du(0.0) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("radial solver handles annuli with two Neumann boundaries") {
  const auto m = euclid(2);
  const auto D = GeoDomain::annulus(0.5, 1.5);
  const auto f = potential::normalize_density(potential::constant_density(), D, m);
  const auto sol = potential::solve_radial(f, D, m);
  CHECK(std::abs(sol.du(1.5) - 1.0) <= 1e-9);
  CHECK(std::abs(sol.du(0.5) + 1.0) <= 1e-9);
}

TEST_CASE("laplacian bound margin for random radial densities") {
  // Delta u <= n f^{1/(n-1)} on U, from the analytic radial solve
  num::Philox rng(77, 1);
  for (int trial = 0; trial < 8; ++trial) {
    const double a = 1.5 + rng.uniform();
    const double b = rng.uniform(-0.8, 0.4);
    const double c = rng.uniform(-0.5, 0.0);
    const auto m = trial % 2 == 0 ? euclid(2) : cone2(0.5);
    const auto D = GeoDomain::ball(1.0);
    auto f = potential::radial_poly_density({a, b, c});
    // keep f positive on [0, 1]
    bool pos = true;
    for (int i = 0; i <= 64; ++i) {
      if (f.value(i / 64.0) <= 0.05) pos = false;
    }
    if (!pos) continue;
    const auto fn = potential::normalize_density(f, D, m);
    const auto sol = potential::solve_radial(fn, D, m);
    const auto lap = potential::laplacian_bound_check(sol);
    CHECK(lap.min_margin >= -1e-8);
  }
}

TEST_CASE("cauchy-schwarz step holds nodewise on U") {
  const auto m = cone2(0.5);
  const auto D = GeoDomain::ball(1.2);
  auto f = potential::normalize_density(
      potential::radial_poly_density({2.0, 0.0, -1.0}), D, m);
  const auto sol = potential::solve_radial(f, D, m);
  for (int i = 0; i < 512; ++i) {
    const double r = 1.2 * (i + 0.5) / 512.0;
    if (std::abs(sol.du(r)) >= 1.0) continue;
    CHECK(-f.deriv(r) * sol.du(r) <= f.grad_mag(r) + 1e-12);
  }
}

TEST_CASE("density with an interior critical point keeps the ODE residual") {
  const auto m = euclid(2);
  const auto D = GeoDomain::ball(1.0);
  // f' vanishes at r = 0.5: |grad f| has a kink there
  auto f = potential::normalize_density(
      potential::radial_poly_density({1.75, 1.0, -1.0}), D, m);
  const auto sol = potential::solve_radial(f, D, m);
  CHECK(sol.residual_interior() <= 1e-9);
  CHECK(sol.residual_neumann() <= 1e-9);
}

TEST_CASE("disk mesh generation: quality, size, boundary") {
  const auto metric = potential::euclidean_chart();
  const auto mesh = potential::disk_mesh(1.0, 0.1, metric);
  CHECK(mesh.min_metric_angle_deg(metric) >= 20.0);
  CHECK(mesh.chart_mesh_size() <= 0.22);
  CHECK(!mesh.boundary_edges.empty());
  // boundary vertices sit on the rim
  for (const auto& e : mesh.boundary_edges) {
    CHECK(mesh.vertices[e[0]].norm() == doctest::Approx(1.0).epsilon(1e-12));
  }

  // warped chart: ring counts follow the metric circumference
  const auto mw = cone2(0.25);
  const auto wmetric = potential::warped_chart(mw);
  const auto wmesh = potential::disk_mesh(1.0, 0.1, wmetric);
  CHECK(wmesh.min_metric_angle_deg(wmetric) >= 20.0);
}

TEST_CASE("mesh IO round trip preserves the triangulation") {
  const auto metric = potential::euclidean_chart();
  const auto mesh = potential::disk_mesh(1.0, 0.2, metric);
  potential::save_mesh(mesh, "/tmp/geosob_mesh_test.txt");
  const auto back = potential::load_mesh("/tmp/geosob_mesh_test.txt");
  REQUIRE(back.vertices.size() == mesh.vertices.size());
  REQUIRE(back.triangles.size() == mesh.triangles.size());
  CHECK(back.boundary_edges.size() == mesh.boundary_edges.size());
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    CHECK((back.vertices[i] - mesh.vertices[i]).norm() == 0.0);
  }
}

TEST_CASE("mesh potential on the euclidean disk converges at order >= 1.8") {
  const auto m = euclid(2);
  const auto f = potential::normalize_density(potential::constant_density(),
                                              GeoDomain::ball(1.0), m);
  const auto metric = potential::euclidean_chart();

  double prev_err = 0.0, prev_h = 0.0;
  std::vector<double> errs, hs;
  for (double h : {0.1, 0.05, 0.025}) {
    auto mesh = std::make_shared<potential::Mesh>(
        potential::disk_mesh(1.0, h, metric));
    const auto sol =
        potential::solve_mesh(f, GeoDomain::meshed(mesh), m);
    // discrete L2 against u = |x|^2/2, mean-adjusted
    double num = 0.0, den = 0.0, mean = 0.0, area = 0.0;
    std::vector<double> exact(mesh->n_vertices());
    for (int v = 0; v < mesh->n_vertices(); ++v) {
      exact[v] = 0.5 * mesh->vertices[v].squaredNorm();
    }
    for (int v = 0; v < mesh->n_vertices(); ++v) {
      mean += sol.u[v] - exact[v];
      area += 1.0;
    }
    mean /= area;
    for (int v = 0; v < mesh->n_vertices(); ++v) {
      const double d = sol.u[v] - exact[v] - mean;
      num += d * d;
      den += 1.0;
    }
    errs.push_back(std::sqrt(num / den));
    hs.push_back(sol.h);
    (void)prev_err;
    (void)prev_h;
  }
  const double order1 = std::log2(errs[0] / errs[1]) / std::log2(hs[0] / hs[1]);
  const double order2 = std::log2(errs[1] / errs[2]) / std::log2(hs[1] / hs[2]);
  CHECK(order1 >= 1.8);
  CHECK(order2 >= 1.8);
  CHECK(errs[2] < 2e-4);
}

TEST_CASE("mesh solution matches the radial oracle for a radial density") {
  const auto m = euclid(2);
  const auto D = GeoDomain::ball(1.0);
  auto f = potential::normalize_density(
      potential::radial_poly_density({2.0, 0.0, -1.0}), D, m);
  const auto radial = potential::solve_radial(f, D, m);
  const auto metric = potential::euclidean_chart();

  double prev = 0.0;
  for (double h : {0.1, 0.05}) {
    auto mesh = std::make_shared<potential::Mesh>(
        potential::disk_mesh(1.0, h, metric));
    const auto sol = potential::solve_mesh(f, GeoDomain::meshed(mesh), m);
    double err = 0.0, mean = 0.0;
    for (int v = 0; v < mesh->n_vertices(); ++v) {
      mean += sol.u[v] - radial.u(mesh->vertices[v].norm());
    }
    mean /= mesh->n_vertices();
    for (int v = 0; v < mesh->n_vertices(); ++v) {
      err = std::max(err, std::abs(sol.u[v] -
                                   radial.u(mesh->vertices[v].norm()) - mean));
    }
    if (prev > 0.0) CHECK(err < 0.35 * prev);  // roughly O(h^2)
    prev = err;
  }
}

TEST_CASE("mesh solution on the warped chart matches the radial oracle") {
  const auto m = cone2(0.5);
  const auto D = GeoDomain::ball(1.0);
  const auto f = potential::normalize_density(potential::constant_density(), D, m);
  const auto radial = potential::solve_radial(f, D, m);
  const auto metric = potential::warped_chart(m);
  auto mesh = std::make_shared<potential::Mesh>(
      potential::disk_mesh(1.0, 0.04, metric));
  const auto sol = potential::solve_mesh(f, GeoDomain::meshed(mesh), m);
  double err = 0.0, mean = 0.0;
  for (int v = 0; v < mesh->n_vertices(); ++v) {
    mean += sol.u[v] - radial.u(mesh->vertices[v].norm());
  }
  mean /= mesh->n_vertices();
  for (int v = 0; v < mesh->n_vertices(); ++v) {
    err = std::max(err, std::abs(sol.u[v] -
                                 radial.u(mesh->vertices[v].norm()) - mean));
  }
  CHECK(err < 6e-3);
  CHECK(sol.residual_neumann < 0.4);  // elementwise P1 flux, O(h)
  const auto lap = potential::laplacian_bound_check(sol, 2, metric);
  CHECK(lap.min_margin >= -10.0 * sol.h);
}

TEST_CASE("unnormalized densities are rejected by the mesh solver") {
  const auto m = euclid(2);
  auto f = potential::constant_density();
  f.scale = 2.0;  // violates the compatibility identity
  const auto metric = potential::euclidean_chart();
  auto mesh = std::make_shared<potential::Mesh>(
      potential::disk_mesh(1.0, 0.1, metric));
  CHECK_THROWS_WITH_AS(
      potential::solve_mesh(f, GeoDomain::meshed(mesh), m),
      doctest::Contains("unnormalized density"), Error);
}

TEST_CASE("mesh renumbering leaves the solution invariant") {
  const auto m = euclid(2);
  const auto D = GeoDomain::ball(1.0);
  const auto f = potential::normalize_density(potential::constant_density(), D, m);
  const auto metric = potential::euclidean_chart();
  auto mesh = std::make_shared<potential::Mesh>(
      potential::disk_mesh(1.0, 0.1, metric));
  const auto sol = potential::solve_mesh(f, GeoDomain::meshed(mesh), m);

  // permute vertices with a fixed shuffle
  const int N = mesh->n_vertices();
  std::vector<int> perm(N);
  for (int i = 0; i < N; ++i) perm[i] = i;
  std::mt19937 gen(12345);
  std::shuffle(perm.begin(), perm.end(), gen);
  auto permuted = std::make_shared<potential::Mesh>();
  permuted->vertices.resize(N);
  for (int i = 0; i < N; ++i) permuted->vertices[perm[i]] = mesh->vertices[i];
  for (const auto& t : mesh->triangles) {
    permuted->triangles.push_back({perm[t[0]], perm[t[1]], perm[t[2]]});
  }
  for (const auto& e : mesh->boundary_edges) {
    permuted->boundary_edges.push_back({perm[e[0]], perm[e[1]]});
  }
  permuted->build_locator();
  const auto sol2 =
      potential::solve_mesh(f, GeoDomain::meshed(permuted), m);

  double gdiff = 0.0;
  for (int i = 0; i < N; ++i) {
    gdiff = std::max(gdiff, (sol2.grad[perm[i]] - sol.grad[i]).norm());
  }
  CHECK(gdiff <= 1e-12);
}
