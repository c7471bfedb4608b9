#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace geosob::harness {

/// One experiment case: manifold + domain (or patch) + density + solver and
/// transport settings. Parsed from the plain-text config format; unknown
/// keys are errors.
struct CaseConfig {
  std::string id = "case";
  std::string theorem = "sobolev_domain";
  // [manifold]
  std::string profile = "euclidean";
  double alpha = 0.5;
  int dim = 2;
  std::string curvature = "ricci";
  std::string spline_knots;  // path to knot table for spline profiles
  // [domain]
  std::string domain_kind = "geodesic_ball";
  double radius = 1.0;
  double radius0 = 0.5;  // annulus inner radius
  std::string solver = "radial";  // radial | mesh | both
  std::string mesh_file;
  // [density]
  std::string density = "constant";
  std::vector<double> coeffs;
  // [sigma]
  std::string patch;
  int k = 2;
  double slice_radius = 1.0;
  // [solver]
  double mesh_h = 0.05;
  double ode_tol = 1e-10;
  // [transport]
  std::vector<double> r_list;
  std::vector<double> sigma_list;
  long mc_budget = 100000;
  std::optional<std::uint64_t> seed;
};

struct ExperimentConfig {
  std::vector<CaseConfig> cases;
};

/// Parses the INI-style config text. Sections before the first [case]
/// provide defaults for every case. Throws ConfigError on unknown sections
/// or keys, or when no seed is given anywhere.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);

}  // namespace geosob::harness
