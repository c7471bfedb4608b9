#include <doctest.h>

#include <cmath>
#include <string>

#include "geosob/errors.hpp"
#include "geosob/harness/config.hpp"
#include "geosob/harness/report.hpp"
#include "geosob/harness/runner.hpp"

using namespace geosob;
using harness::CaseConfig;

namespace {

const char* kBatchConfig = R"(
# shared defaults
[manifold]
dim = 2
class = sectional
[transport]
seed = 42

[case]
id = euclid
theorem = sobolev_domain
[manifold]
profile = euclidean
[domain]
kind = geodesic_ball
radius = 1.0

[case]
id = cone_a
theorem = sobolev_domain
[manifold]
profile = cone_smoothed
alpha = 0.5
[domain]
radius = 1.0

[case]
id = cone_b
theorem = isoperimetric
[manifold]
profile = cone_smoothed
alpha = 0.25
[domain]
radius = 2.0
)";

}  // namespace

TEST_CASE("config parsing: defaults, sections, per-case overrides") {
  const auto cfg = harness::parse_config_text(kBatchConfig);
  REQUIRE(cfg.cases.size() == 3);
  CHECK(cfg.cases[0].id == "euclid");
  CHECK(cfg.cases[0].profile == "euclidean");
  CHECK(cfg.cases[0].curvature == "sectional");  // inherited default
  CHECK(cfg.cases[1].alpha == 0.5);
  CHECK(cfg.cases[2].theorem == "isoperimetric");
  CHECK(cfg.cases[2].radius == 2.0);
  for (const auto& c : cfg.cases) CHECK(c.seed == 42);
}

TEST_CASE("config parsing: unknown keys and missing seeds are errors") {
  CHECK_THROWS_AS(harness::parse_config_text("[manifold]\nprofle = euclidean\n"
                                             "[transport]\nseed = 1\n"),
                  ConfigError);
  CHECK_THROWS_AS(harness::parse_config_text("[wat]\nx = 1\n"), ConfigError);
  CHECK_THROWS_AS(
      harness::parse_config_text("[manifold]\nprofile = euclidean\n"),
      ConfigError);  // no seed anywhere
  CHECK_THROWS_AS(
      harness::parse_config_text("[case]\ntheorem = bogus\n[transport]\nseed = 1\n"),
      ConfigError);
}

TEST_CASE("run_case: euclidean equality and failure rows never throw") {
  CaseConfig c;
  c.id = "euclid";
  c.theorem = "sobolev_domain";
  c.profile = "euclidean";
  c.seed = 7;
  const auto rows = harness::run_case(c);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].status == "pass");
  CHECK(rows[0].ratio == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(rows[0].theta == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(rows[0].hessian_residual >= 0.0);
  CHECK(rows[0].hessian_residual <= 1e-8);

  // a broken configuration becomes a fail row, not an exception
  CaseConfig bad = c;
  bad.density = "radial_poly";
  bad.coeffs = {-1.0};  // nonpositive density
  const auto bad_rows = harness::run_case(bad);
  REQUIRE(bad_rows.size() == 1);
  CHECK(bad_rows[0].status == "fail");
  CHECK(!bad_rows[0].note.empty());
}

TEST_CASE("strict-inequality cases skip the rigidity diagnostics") {
  CaseConfig c;
  c.id = "cone";
  c.theorem = "sobolev_domain";
  c.profile = "cone_smoothed";
  c.alpha = 0.5;
  c.seed = 7;
  const auto rows = harness::run_case(c);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].status == "pass");
  CHECK(rows[0].ratio > 1.0 + 1e-4);
  CHECK(rows[0].note == "not near equality");
  CHECK(rows[0].hessian_residual == -1.0);  // gate not entered
}

TEST_CASE("reports: exact CSV schema and 17-digit determinism") {
  const auto cfg = harness::parse_config_text(kBatchConfig);
  const auto rows = harness::run_batch(cfg, 1);
  const std::string csv = harness::to_csv(rows);
  CHECK(csv.rfind("case_id,theorem,n,m,theta,lhs,rhs,ratio,status,h,ode_tol,"
                  "mc_stderr,seed\n", 0) == 0);

  const auto rows2 = harness::run_batch(cfg, 1);
  CHECK(harness::to_csv(rows2) == csv);
  CHECK(harness::to_json(rows2) == harness::to_json(rows));
}

TEST_CASE("batch rows are independent of the thread-pool size") {
  const auto cfg = harness::parse_config_text(kBatchConfig);
  const auto seq = harness::run_batch(cfg, 1);
  const auto par = harness::run_batch(cfg, 8);
  CHECK(harness::to_csv(seq) == harness::to_csv(par));
}

TEST_CASE("permuting the case order permutes rows, numbers unchanged") {
  auto cfg = harness::parse_config_text(kBatchConfig);
  auto swapped = cfg;
  std::swap(swapped.cases[0], swapped.cases[2]);
  const auto a = harness::run_batch(cfg, 1);
  const auto b = harness::run_batch(swapped, 1);
  REQUIRE(a.size() == b.size());
  for (const auto& row : a) {
    bool found = false;
    for (const auto& other : b) {
      if (other.case_id == row.case_id) {
        found = true;
        CHECK(other.ratio == row.ratio);
        CHECK(other.lhs == row.lhs);
        CHECK(other.rhs == row.rhs);
      }
    }
    CHECK(found);
  }
}

TEST_CASE("csv/json round trip preserves every numeric field") {
  const auto cfg = harness::parse_config_text(kBatchConfig);
  const auto rows = harness::run_batch(cfg, 1);
  const auto from_json = harness::inequality_rows_from_json(harness::to_json(rows));
  const auto from_csv = harness::inequality_rows_from_csv(harness::to_csv(rows));
  REQUIRE(from_json.size() == rows.size());
  REQUIRE(from_csv.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(from_json[i].ratio == rows[i].ratio);
    CHECK(from_csv[i].ratio == rows[i].ratio);
    CHECK(from_json[i].lhs == rows[i].lhs);
    CHECK(from_csv[i].lhs == rows[i].lhs);
    CHECK(from_csv[i].theta == rows[i].theta);
    CHECK(from_csv[i].seed == rows[i].seed);
  }
}

TEST_CASE("empty row lists are rejected") {
  CHECK_THROWS_AS(harness::to_csv(std::vector<harness::InequalityReport>{}),
                  Error);
  CHECK_THROWS_AS(harness::to_json(std::vector<harness::TransportRow>{}), Error);
}

TEST_CASE("transport rows: euclidean coverage and capture") {
  CaseConfig c;
  c.id = "euclid";
  c.theorem = "sobolev_domain";
  c.profile = "euclidean";
  c.seed = 42;
  c.r_list = {10.0};
  c.sigma_list = {0.0};
  c.mc_budget = 20000;
  const auto rows = harness::run_transport(c);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].status == "pass");
  CHECK(rows[0].verified_fraction == 1.0);
  CHECK(rows[0].slack > 0.0);
  CHECK(rows[0].lhs > 0.0);

  const std::string csv = harness::to_csv(rows);
  CHECK(csv.rfind("r,sigma,lhs,lhs_stderr,rhs,slack,verified_fraction,seed\n",
                  0) == 0);
}

TEST_CASE("convergence study reaches second order on the equality case") {
  CaseConfig c;
  c.id = "euclid";
  c.theorem = "sobolev_domain";
  c.profile = "euclidean";
  c.mesh_h = 0.1;
  c.seed = 1;
  const auto rows = harness::convergence_study(c, 3);
  REQUIRE(rows.size() == 3);
  CHECK(rows[1].order_u >= 1.8);
  CHECK(rows[2].order_u >= 1.8);
  // the inequality ratio deviation shrinks with refinement
  CHECK(rows[2].ratio_dev < rows[0].ratio_dev);
  CHECK_THROWS_AS(harness::convergence_study(c, 2), ConfigError);
}
