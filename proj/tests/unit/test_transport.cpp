#include <doctest.h>

#include <cmath>

#include "geosob/errors.hpp"
#include "geosob/potential/solver.hpp"
#include "geosob/transport/transport.hpp"

using namespace geosob;
using models::CurvatureClass;
using potential::GeoDomain;

namespace {

struct DomainSetup {
  models::WarpedModel model;
  potential::RadialDensity density;
  potential::RadialPotential sol;
};

DomainSetup euclid_unit_disk() {
  auto model = models::make_model(2, models::euclidean_profile(),
                                  CurvatureClass::sectional_nonneg);
  const auto D = GeoDomain::ball(1.0);
  auto f = potential::normalize_density(potential::constant_density(), D, model);
  auto sol = potential::solve_radial(f, D, model);
  return {std::move(model), std::move(f), std::move(sol)};
}

DomainSetup cone_disk(double alpha = 0.5, double R = 1.0) {
  auto model = models::make_model(2, models::cone_smoothed_profile(alpha),
                                  CurvatureClass::sectional_nonneg);
  const auto D = GeoDomain::ball(R);
  auto f = potential::normalize_density(potential::constant_density(), D, model);
  auto sol = potential::solve_radial(f, D, model);
  return {std::move(model), std::move(f), std::move(sol)};
}

}  // namespace

TEST_CASE("euclidean transport map: image (1+r)x and jacobian (1+r)^n") {
  const auto setup = euclid_unit_disk();
  const double r = 10.0;
  for (double s : {0.05, 0.3, 0.6, 0.9}) {
    const auto res = transport::phi_map(setup.model, setup.sol, s, r);
    CHECK(res.image_radius == doctest::Approx((1.0 + r) * s).epsilon(1e-10));
    // f = 1 on the unit ball: c = 1, equality in the jacobian bound
    CHECK(res.jacobian ==
          doctest::Approx(std::pow(1.0 + r, 2)).epsilon(1e-8));
    CHECK(res.bound == doctest::Approx(std::pow(1.0 + r, 2)).epsilon(1e-12));
    CHECK(res.jacobian <= res.bound + 1e-6);
    CHECK(res.monotone_increase <= 1e-8);
    CHECK(res.trace_margin >= -1e-8);
  }
}

TEST_CASE("warped jacobian matches a finite-difference oracle") {
  const auto setup = cone_disk(0.5);
  const double r = 5.0;
  const double s = 0.55;
  const auto res = transport::phi_map(setup.model, setup.sol, s, r);

  // radial map rho(s) = s + r u'(s); by symmetry the tangential stretch is
  // phi(rho)/phi(s), so det DPhi = rho'(s) (phi(rho)/phi(s))^{n-1}
  const double eps = 1e-6;
  const auto rho = [&](double ss) { return ss + r * setup.sol.du(ss); };
  const double drho = (rho(s + eps) - rho(s - eps)) / (2.0 * eps);
  const double oracle =
      drho * setup.model.profile.phi(rho(s)) / setup.model.profile.phi(s);
  CHECK(res.jacobian == doctest::Approx(oracle).epsilon(1e-5));
  CHECK(res.jacobian <= res.bound + 1e-6);
  CHECK(res.monotone_increase <= 1e-8 * res.jacobian);
  CHECK(res.trace_margin >= -1e-8);
}

TEST_CASE("contact test: euclidean contact points verify with zero margin") {
  const auto setup = euclid_unit_disk();
  const double r = 10.0;
  transport::ContactProbeOptions opts;
  for (double s : {0.2, 0.5, 0.8}) {
    const auto v = transport::contact_test(setup.model, setup.sol, s, r, opts);
    CHECK(v.in_U);
    CHECK(v.is_contact);
    // the functional r u(x) + d(x, Phi)^2/2 is minimized exactly at x
    CHECK(v.margin >= -1e-9 * v.scale);
    CHECK(v.boundary_margin > 1e-3);
  }
}

TEST_CASE("contact test rejects points outside U") {
  // an annulus solution has u' = -1 at the inner boundary: |grad u| >= 1
  auto model = models::make_model(2, models::euclidean_profile(),
                                  CurvatureClass::sectional_nonneg);
  const auto D = GeoDomain::annulus(0.5, 1.5);
  auto f = potential::normalize_density(potential::constant_density(), D, model);
  auto sol = potential::solve_radial(f, D, model);
  const auto v = transport::contact_test(model, sol, 0.5, 4.0);
  CHECK_FALSE(v.in_U);
  CHECK_FALSE(v.is_contact);
}

TEST_CASE("warped contact points verify within tolerance") {
  const auto setup = cone_disk(0.5);
  const double r = 6.0;
  transport::ContactProbeOptions opts;
  opts.radial = 12;
  opts.angular = 6;
  opts.random = 16;
  for (double s : {0.3, 0.7}) {
    const auto v = transport::contact_test(setup.model, setup.sol, s, r, opts);
    CHECK(v.in_U);
    CHECK(v.is_contact);
    CHECK(v.boundary_margin > 0.0);
    CHECK(v.skipped == 0);
  }
}

TEST_CASE("far ball radius: euclidean closed form r - R") {
  const auto setup = euclid_unit_disk();
  const double rho =
      transport::far_ball_radius(setup.model, GeoDomain::ball(1.0), 10.0);
  CHECK(rho == doctest::Approx(9.0).epsilon(1e-9));
}

TEST_CASE("coverage experiment: euclidean disk recovers every target") {
  const auto setup = euclid_unit_disk();
  transport::TransportConfig cfg;
  cfg.r = 10.0;
  cfg.sample_count = 1000;
  cfg.seed = 42;
  const auto rep =
      transport::coverage_experiment(setup.model, setup.sol, GeoDomain::ball(1.0), cfg);
  CHECK_FALSE(rep.vacuous);
  CHECK(rep.targets == 1000);
  CHECK(rep.verified == 1000);
  CHECK(rep.fraction == 1.0);
  CHECK(rep.worst_image_error <= 1e-6);
  CHECK(rep.boundary_hits == 0);
  // closed form: the minimizer is p/(1+r); spot margins stay nonnegative
  CHECK(rep.worst_spot_margin >= -1e-7);
}

TEST_CASE("coverage experiment: vacuous when r is too small") {
  const auto setup = euclid_unit_disk();
  transport::TransportConfig cfg;
  cfg.r = 0.5;  // no point is within 0.5 of every point of the unit disk
  cfg.seed = 42;
  const auto rep = transport::coverage_experiment(setup.model, setup.sol,
                                                  GeoDomain::ball(1.0), cfg);
  CHECK(rep.vacuous);
}

TEST_CASE("coverage experiment: cone-smoothed model verifies >= 99%") {
  const auto setup = cone_disk(0.5);
  transport::TransportConfig cfg;
  cfg.r = 10.0;
  cfg.sample_count = 400;
  cfg.seed = 7;
  transport::CoverageOptions opts;
  opts.image_tol = 1e-5;
  opts.spot_targets = 6;
  opts.spot_radial = 8;
  opts.spot_angular = 4;
  const auto rep = transport::coverage_experiment(setup.model, setup.sol,
                                                  GeoDomain::ball(1.0), cfg, opts);
  CHECK_FALSE(rep.vacuous);
  CHECK(rep.fraction >= 0.99);
  CHECK(rep.worst_spot_margin >= -1e-5);
}

TEST_CASE("capture inequality: euclidean closed forms") {
  const auto setup = euclid_unit_disk();
  transport::TransportConfig cfg;
  cfg.r = 10.0;
  cfg.sample_count = 200000;
  cfg.seed = 42;
  const auto rep = transport::capture_inequality(setup.model, setup.sol,
                                                 GeoDomain::ball(1.0), cfg);
  // lhs = omega_2 (r-1)^2 exactly, rhs = omega_2 (1+r)^2
  CHECK(rep.lhs_exact == doctest::Approx(M_PI * 81.0).epsilon(1e-8));
  CHECK(rep.rhs == doctest::Approx(M_PI * 121.0).epsilon(1e-8));
  CHECK(rep.status == "pass");
  CHECK(std::abs(rep.lhs_mc - rep.lhs_exact) <= 3.0 * rep.lhs_stderr);
  CHECK(rep.slack > 0.0);
}

TEST_CASE("capture sweep approaches the omega_n theta asymptote") {
  const auto setup = euclid_unit_disk();
  for (double r : {10.0, 20.0, 40.0}) {
    transport::TransportConfig cfg;
    cfg.r = r;
    cfg.sample_count = 50000;
    cfg.seed = 11;
    const auto rep = transport::capture_inequality(setup.model, setup.sol,
                                                   GeoDomain::ball(1.0), cfg);
    const double expected = M_PI * std::pow(1.0 - 1.0 / r, 2);
    CHECK(rep.lhs_exact / (r * r) == doctest::Approx(expected).epsilon(1e-6));
  }
  // by r = 40 the ratio is within 5% of omega_2 theta = pi
  transport::TransportConfig cfg;
  cfg.r = 40.0;
  cfg.sample_count = 50000;
  cfg.seed = 11;
  const auto rep = transport::capture_inequality(setup.model, setup.sol,
                                                 GeoDomain::ball(1.0), cfg);
  CHECK(std::abs(rep.lhs_exact / 1600.0 - M_PI) / M_PI < 0.05);
}

TEST_CASE("capture inequality on the cone model with Monte Carlo slack") {
  const auto setup = cone_disk(0.5);
  transport::TransportConfig cfg;
  cfg.r = 12.0;
  cfg.sample_count = 100000;
  cfg.seed = 3;
  const auto rep = transport::capture_inequality(setup.model, setup.sol,
                                                 GeoDomain::ball(1.0), cfg);
  CHECK(rep.status == "pass");
  CHECK(std::abs(rep.lhs_mc - rep.lhs_exact) <= 3.0 * rep.lhs_stderr);
  // the asymptote lhs/r^n -> omega_2 theta
  const double asym = M_PI * setup.model.theta;
  CHECK(std::abs(rep.lhs_exact / (12.0 * 12.0) - asym) / asym < 0.2);
}

TEST_CASE("capture inequality is deterministic in the seed") {
  const auto setup = cone_disk(0.5);
  transport::TransportConfig cfg;
  cfg.r = 8.0;
  cfg.sample_count = 20000;
  cfg.seed = 99;
  const auto a = transport::capture_inequality(setup.model, setup.sol,
                                               GeoDomain::ball(1.0), cfg);
  const auto b = transport::capture_inequality(setup.model, setup.sol,
                                               GeoDomain::ball(1.0), cfg);
  CHECK(a.lhs_mc == b.lhs_mc);
  CHECK(a.lhs_stderr == b.lhs_stderr);
  cfg.seed = 100;
  const auto c = transport::capture_inequality(setup.model, setup.sol,
                                               GeoDomain::ball(1.0), cfg);
  CHECK(a.lhs_mc != c.lhs_mc);
}

TEST_CASE("sigma shells shrink the captured volume") {
  const auto setup = euclid_unit_disk();
  transport::TransportConfig cfg;
  cfg.r = 10.0;
  cfg.sample_count = 50000;
  cfg.seed = 5;
  const auto full = transport::capture_inequality(setup.model, setup.sol,
                                                  GeoDomain::ball(1.0), cfg);
  cfg.sigma = 0.5;
  const auto shell = transport::capture_inequality(setup.model, setup.sol,
                                                   GeoDomain::ball(1.0), cfg);
  // {p : sigma r < d < r} = annulus sigma r + R < rho < rho_max
  CHECK(shell.lhs_exact ==
        doctest::Approx(M_PI * (81.0 - 36.0)).epsilon(1e-8));
  CHECK(shell.lhs_exact < full.lhs_exact);
  CHECK(shell.status == "pass");

  cfg.sigma = 0.95;
  const auto vac = transport::capture_inequality(setup.model, setup.sol,
                                                 GeoDomain::ball(1.0), cfg);
  CHECK(vac.status == "vacuous");
}
