#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <string>

#include "geosob/errors.hpp"
#include "geosob/harness/config.hpp"
#include "geosob/harness/report.hpp"
#include "geosob/harness/runner.hpp"

namespace {

using namespace geosob;

struct CommonArgs {
  std::string config_path;
  std::string out_path;
  std::string format = "csv";
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = 1;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "experiment config file")
      ->required();
  cmd->add_option("--out", args.out_path, "report output path");
  cmd->add_option("--format", args.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--seed", args.seed, "override the config seed")
      ->each([&args](const std::string&) { args.seed_set = true; });
  cmd->add_option("--threads", args.threads, "worker threads for the batch");
}

harness::ExperimentConfig load(const CommonArgs& args,
                               const std::string& theorem_family) {
  harness::ExperimentConfig cfg = harness::load_config(args.config_path);
  for (auto& c : cfg.cases) {
    if (args.seed_set) c.seed = args.seed;
    if (theorem_family == "sobolev") {
      if (c.theorem != "sobolev_domain" && c.theorem != "isoperimetric") {
        throw ConfigError("check-sobolev handles sobolev_domain/isoperimetric "
                          "cases; got " + c.theorem);
      }
    } else if (theorem_family == "michael_simon") {
      if (c.theorem != "michael_simon" && c.theorem != "minimal_isoperimetric") {
        throw ConfigError("check-michael-simon handles michael_simon/"
                          "minimal_isoperimetric cases; got " + c.theorem);
      }
    }
  }
  return cfg;
}

int emit_inequality(const std::vector<harness::InequalityReport>& rows,
                    const CommonArgs& args) {
  std::cout << harness::summary_lines(rows);
  if (!args.out_path.empty()) {
    harness::write_file(args.out_path, args.format == "json"
                                           ? harness::to_json(rows)
                                           : harness::to_csv(rows));
  }
  for (const auto& r : rows) {
    if (r.status == "fail") return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sharp Sobolev / Michael-Simon inequality checks on "
               "rotationally symmetric models"};
  app.require_subcommand(1);

  CommonArgs sob_args, ms_args, tr_args, conv_args;
  int conv_levels = 3;

  CLI::App* sob = app.add_subcommand(
      "check-sobolev", "domain Sobolev / isoperimetric inequality checks");
  add_common(sob, sob_args);

  CLI::App* ms = app.add_subcommand(
      "check-michael-simon", "submanifold Michael-Simon inequality checks");
  add_common(ms, ms_args);

  CLI::App* tr = app.add_subcommand(
      "transport-experiment", "coverage and volume-capture experiments");
  add_common(tr, tr_args);

  CLI::App* conv =
      app.add_subcommand("convergence", "mesh refinement order study");
  add_common(conv, conv_args);
  conv->add_option("--levels", conv_levels, "refinement levels (>= 3)");

  CLI::App* lp = app.add_subcommand("list-presets", "print built-in presets");

  CLI11_PARSE(app, argc, argv);

  try {
    if (lp->parsed()) {
      std::cout << "profiles: euclidean, cone_smoothed(alpha), "
                   "capped_paraboloid(alpha), spline(knots file)\n"
                << "densities: constant, radial_poly(coeffs)\n"
                << "domains: geodesic_ball(radius), "
                   "geodesic_annulus(radius0, radius), meshed_region(file)\n"
                << "patches: flat_disk, flat_disk3, flat_strip, circle, arc, "
                   "spiral, complex_curve(k), hemisphere, catenoid_band, "
                   "warped_slice_disk\n";
      return 0;
    }
    if (sob->parsed()) {
      const auto cfg = load(sob_args, "sobolev");
      return emit_inequality(harness::run_batch(cfg, sob_args.threads), sob_args);
    }
    if (ms->parsed()) {
      const auto cfg = load(ms_args, "michael_simon");
      return emit_inequality(harness::run_batch(cfg, ms_args.threads), ms_args);
    }
    if (tr->parsed()) {
      const auto cfg = load(tr_args, "any");
      std::vector<harness::TransportRow> rows;
      for (const auto& c : cfg.cases) {
        const auto part = harness::run_transport(c);
        rows.insert(rows.end(), part.begin(), part.end());
      }
      for (const auto& r : rows) {
        std::cout << "[" << (r.status == "pass" ? "PASS" : r.status == "fail" ? "FAIL" : "INFO")
                  << "] r=" << r.r << " sigma=" << r.sigma << " lhs=" << r.lhs
                  << " rhs=" << r.rhs << " slack=" << r.slack
                  << " verified=" << r.verified_fraction << "\n";
      }
      if (!tr_args.out_path.empty()) {
        harness::write_file(tr_args.out_path, tr_args.format == "json"
                                                  ? harness::to_json(rows)
                                                  : harness::to_csv(rows));
      }
      for (const auto& r : rows) {
        if (r.status == "fail") return 1;
      }
      return 0;
    }
    if (conv->parsed()) {
      const auto cfg = load(conv_args, "any");
      std::string all;
      bool ok = true;
      for (const auto& c : cfg.cases) {
        const auto rows = harness::convergence_study(c, conv_levels);
        all += harness::convergence_csv(rows);
        std::cout << harness::convergence_csv(rows);
        if (rows.back().order_u < 1.8 && rows.size() > 1) ok = false;
      }
      if (!conv_args.out_path.empty()) {
        harness::write_file(conv_args.out_path, all);
      }
      return ok ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
