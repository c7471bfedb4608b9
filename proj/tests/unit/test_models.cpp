#include <doctest.h>

#include <cmath>

#include "geosob/errors.hpp"
#include "geosob/models/model.hpp"
#include "geosob/num/quadrature.hpp"

using namespace geosob;
using models::CurvatureClass;

TEST_CASE("euclidean profile validates with zero violation") {
  const auto grid = models::default_validation_grid();
  const auto cert = models::validate_profile(models::euclidean_profile(),
                                             CurvatureClass::sectional_nonneg,
                                             grid);
  CHECK(cert.accepted);
  CHECK(cert.max_concavity_violation == 0.0);
  CHECK(cert.max_slope_violation == 0.0);
  CHECK(cert.origin_value_violation == 0.0);
  CHECK(cert.origin_slope_violation == 0.0);
}

TEST_CASE("cone-smoothed profile is accepted in the sectional class") {
  // phi'' = -(1-a) e^{-r} <= 0 and phi' = a + (1-a) e^{-r} in (a, 1]
  const auto grid = models::default_validation_grid();
  const auto cert = models::validate_profile(
      models::cone_smoothed_profile(0.5), CurvatureClass::sectional_nonneg,
      grid);
  CHECK(cert.accepted);
  CHECK(cert.max_concavity_violation <= 1e-10);
  CHECK(cert.max_slope_violation <= 1e-10);
}

TEST_CASE("convex profile is rejected") {
  models::WarpedProfile bad;
  bad.phi = [](double r) { return r + r * r; };
  bad.dphi = [](double r) { return 1.0 + 2.0 * r; };
  bad.ddphi = [](double) { return 2.0; };
  bad.asymptotic_slope = 1.0;
  const auto grid = models::default_validation_grid(5.0, 100);
  const auto cert =
      models::validate_profile(bad, CurvatureClass::ricci_nonneg, grid);
  CHECK_FALSE(cert.accepted);
  CHECK(cert.max_concavity_violation >= 2.0);
}

TEST_CASE("cone-point profiles are rejected") {
  models::WarpedProfile cone;
  cone.phi = [](double r) { return 0.5 * r; };
  cone.dphi = [](double) { return 0.5; };
  cone.ddphi = [](double) { return 0.0; };
  cone.asymptotic_slope = 0.5;
  const auto grid = models::default_validation_grid(5.0, 100);
  const auto cert =
      models::validate_profile(cone, CurvatureClass::ricci_nonneg, grid);
  CHECK_FALSE(cert.accepted);
  CHECK(cert.origin_slope_violation == doctest::Approx(0.5));
}

TEST_CASE("unit ball volumes") {
  CHECK(models::unit_ball_volume(1) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(models::unit_ball_volume(2) == doctest::Approx(M_PI).epsilon(1e-14));
  CHECK(models::unit_ball_volume(4) ==
        doctest::Approx(M_PI * M_PI / 2.0).epsilon(1e-14));
  // (n+2) omega_{n+2} = 2 omega_2 omega_n at n = 2
  CHECK(4.0 * models::unit_ball_volume(4) ==
        doctest::Approx(2.0 * models::unit_ball_volume(2) *
                        models::unit_ball_volume(2))
            .epsilon(1e-14));
  // recursion omega_k = omega_{k-2} * 2 pi / k
  CHECK(models::unit_ball_volume(5) ==
        doctest::Approx(8.0 * M_PI * M_PI / 15.0).epsilon(1e-14));
}

TEST_CASE("ball volumes: euclidean closed forms and a trapezoid oracle") {
  auto eucl2 = models::make_model(2, models::euclidean_profile(),
                                  CurvatureClass::sectional_nonneg);
  CHECK(models::ball_volume(eucl2, 1.0) == doctest::Approx(M_PI).epsilon(1e-12));

  auto eucl3 = models::make_model(3, models::euclidean_profile(),
                                  CurvatureClass::sectional_nonneg);
  CHECK(models::ball_volume(eucl3, 2.0) ==
        doctest::Approx(32.0 * M_PI / 3.0).epsilon(1e-12));

  // independent fixed-step trapezoid oracle at 10^6 nodes
  auto cone = models::make_model(2, models::cone_smoothed_profile(0.5),
                                 CurvatureClass::sectional_nonneg);
  const double R = 10.0;
  const int N = 1'000'000;
  double trap = 0.0;
  for (int i = 0; i <= N; ++i) {
    const double s = R * double(i) / N;
    const double v = cone.profile.phi(s);
    trap += (i == 0 || i == N) ? 0.5 * v : v;
  }
  trap *= 2.0 * models::unit_ball_volume(2) * (R / N);
  CHECK(models::ball_volume(cone, R) == doctest::Approx(trap).epsilon(1e-8));
}

TEST_CASE("asymptotic volume ratio estimators agree and match alpha^{k-1}") {
  auto cone = models::make_model(2, models::cone_smoothed_profile(0.5),
                                 CurvatureClass::sectional_nonneg);
  const auto est = models::asymptotic_volume_ratio(cone, 1000.0);
  // analytic slope at R = 1000: alpha + (1-alpha)(1-e^{-R})/R
  const double raw = cone.profile.phi(1000.0) / 1000.0;
  CHECK(raw == doctest::Approx(0.5005).epsilon(1e-6));
  CHECK(est.theta == doctest::Approx(0.5).epsilon(1e-4 / 0.5));
  CHECK(std::abs(est.slope_estimate - est.volume_estimate) <= 1e-6);
  CHECK(cone.theta == doctest::Approx(0.5).epsilon(2e-4));

  auto eucl = models::make_model(3, models::euclidean_profile(),
                                 CurvatureClass::sectional_nonneg);
  CHECK(eucl.theta == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("theta is at most one for every accepted preset") {
  for (double alpha : {0.25, 0.5, 0.75, 1.0}) {
    auto m = models::make_model(2,
                                alpha == 1.0
                                    ? models::euclidean_profile()
                                    : models::cone_smoothed_profile(alpha),
                                CurvatureClass::sectional_nonneg);
    CHECK(m.theta <= 1.0 + 1e-12);
    CHECK(m.theta == doctest::Approx(alpha).epsilon(1e-4));
  }
  auto cap = models::make_model(3, models::capped_paraboloid_profile(0.6),
                                CurvatureClass::sectional_nonneg);
  CHECK(cap.theta <= 1.0 + 1e-12);
  CHECK(cap.theta == doctest::Approx(0.36).epsilon(1e-4));
}

TEST_CASE("bishop-gromov quotient is nonincreasing for every preset") {
  const std::vector<models::WarpedModel> presets = {
      models::make_model(2, models::euclidean_profile(),
                         CurvatureClass::sectional_nonneg),
      models::make_model(2, models::cone_smoothed_profile(0.5),
                         CurvatureClass::sectional_nonneg),
      models::make_model(2, models::capped_paraboloid_profile(0.5),
                         CurvatureClass::sectional_nonneg),
      models::make_model(3, models::cone_smoothed_profile(0.25),
                         CurvatureClass::ricci_nonneg),
  };
  for (const auto& m : presets) {
    const double omega = models::unit_ball_volume(m.dim);
    double prev = std::numeric_limits<double>::infinity();
    double last = 0.0;
    for (int i = 1; i <= 100; ++i) {
      const double r = 20.0 * i / 100.0;
      const double q = models::ball_volume(m, r) / (omega * std::pow(r, m.dim));
      CHECK(q <= prev + 1e-10);
      prev = q;
      last = q;
    }
    CHECK(last >= m.theta - 1e-6);
  }
}

TEST_CASE("concave spline profiles are accepted, convex ones throw") {
  // concave data sampled from the cone-smoothed profile
  const auto src = models::cone_smoothed_profile(0.5);
  std::vector<double> rs, ps;
  for (int i = 0; i <= 40; ++i) {
    rs.push_back(i * 0.5);
    ps.push_back(src.phi(i * 0.5));
  }
  const auto spl = models::spline_profile(rs, ps);
  CHECK(spl.asymptotic_slope == doctest::Approx(0.5).epsilon(1e-3));
  const auto cert = models::validate_profile(
      spl, CurvatureClass::ricci_nonneg, models::default_validation_grid(15.0, 200));
  CHECK(cert.accepted);

  std::vector<double> bad_r = {0.0, 0.5, 1.0, 2.0};
  std::vector<double> bad_p = {0.0, 0.5, 1.2, 4.0};  // convex growth
  CHECK_THROWS_AS(models::spline_profile(bad_r, bad_p), Error);
}
