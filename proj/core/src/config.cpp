#include "geosob/harness/config.hpp"

#include <fstream>
#include <sstream>

#include "geosob/errors.hpp"

namespace geosob::harness {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<double> parse_doubles(const std::string& s) {
  std::vector<double> out;
  std::istringstream is(s);
  double v;
  while (is >> v) out.push_back(v);
  return out;
}

void apply(CaseConfig& c, const std::string& section, const std::string& key,
           const std::string& value, bool* saw_seed) {
  const std::string where = "[" + section + "] " + key;
  const auto as_double = [&] {
    try {
      return std::stod(value);
    } catch (...) {
      throw ConfigError("bad numeric value for " + where + ": " + value);
    }
  };
  const auto as_int = [&] { return static_cast<int>(as_double()); };

  if (section == "case") {
    if (key == "id") c.id = value;
    else if (key == "theorem") c.theorem = value;
    else throw ConfigError("unknown key " + where);
  } else if (section == "manifold") {
    if (key == "profile") c.profile = value;
    else if (key == "alpha") c.alpha = as_double();
    else if (key == "dim") c.dim = as_int();
    else if (key == "class") c.curvature = value;
    else if (key == "spline_knots") c.spline_knots = value;
    else throw ConfigError("unknown key " + where);
  } else if (section == "domain") {
    if (key == "kind") c.domain_kind = value;
    else if (key == "radius") c.radius = as_double();
    else if (key == "radius0") c.radius0 = as_double();
    else if (key == "solver") c.solver = value;
    else if (key == "mesh_file") c.mesh_file = value;
    else throw ConfigError("unknown key " + where);
  } else if (section == "density") {
    if (key == "preset") c.density = value;
    else if (key == "coeffs") c.coeffs = parse_doubles(value);
    else throw ConfigError("unknown key " + where);
  } else if (section == "sigma") {
    if (key == "preset") c.patch = value;
    else if (key == "k") c.k = as_int();
    else if (key == "codim") {
      if (as_int() != 1 && as_int() != 2)
        throw ConfigError("sigma.codim must be 1 or 2");
    } else if (key == "slice_radius") c.slice_radius = as_double();
    else throw ConfigError("unknown key " + where);
  } else if (section == "solver") {
    if (key == "mesh_h") c.mesh_h = as_double();
    else if (key == "ode_tol") c.ode_tol = as_double();
    else throw ConfigError("unknown key " + where);
  } else if (section == "transport") {
    if (key == "r_list") c.r_list = parse_doubles(value);
    else if (key == "sigma_list") c.sigma_list = parse_doubles(value);
    else if (key == "mc_budget") c.mc_budget = static_cast<long>(as_double());
    else if (key == "seed") {
      c.seed = static_cast<std::uint64_t>(std::stoull(value));
      *saw_seed = true;
    } else throw ConfigError("unknown key " + where);
  } else {
    throw ConfigError("unknown section [" + section + "]");
  }
}

void validate(const CaseConfig& c) {
  const auto oneof = [](const std::string& v,
                        std::initializer_list<const char*> allowed,
                        const std::string& what) {
    for (const char* a : allowed) {
      if (v == a) return;
    }
    throw ConfigError("invalid " + what + ": " + v);
  };
  oneof(c.theorem,
        {"sobolev_domain", "isoperimetric", "michael_simon",
         "minimal_isoperimetric"},
        "case.theorem");
  oneof(c.profile, {"euclidean", "cone_smoothed", "capped_paraboloid", "spline"},
        "manifold.profile");
  oneof(c.curvature, {"ricci", "sectional"}, "manifold.class");
  oneof(c.domain_kind, {"geodesic_ball", "geodesic_annulus", "meshed_region"},
        "domain.kind");
  oneof(c.solver, {"radial", "mesh", "both"}, "domain.solver");
  oneof(c.density, {"constant", "radial_poly"}, "density.preset");
  if (!(c.mesh_h > 0.0) || !(c.ode_tol > 0.0)) {
    throw ConfigError("solver tolerances must be positive");
  }
  if (c.dim < 2) throw ConfigError("manifold.dim must be >= 2");
  if (!c.seed.has_value()) {
    throw ConfigError("no seed given for case '" + c.id +
                      "' ([transport] seed is required; there is no entropy "
                      "default)");
  }
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  std::istringstream in(text);
  std::string line, section;
  CaseConfig defaults;
  bool defaults_saw_seed = false;
  bool in_case = false;
  bool case_saw_seed = false;
  ExperimentConfig cfg;
  CaseConfig current;

  const auto flush = [&] {
    if (in_case) {
      if (!case_saw_seed && defaults_saw_seed) current.seed = defaults.seed;
      validate(current);
      cfg.cases.push_back(current);
    }
  };

  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("malformed section header at line " +
                          std::to_string(lineno));
      }
      section = trim(line.substr(1, line.size() - 2));
      if (section == "case") {
        flush();
        in_case = true;
        case_saw_seed = false;
        current = defaults;
        current.id = "case" + std::to_string(cfg.cases.size() + 1);
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("expected key = value at line " + std::to_string(lineno));
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty()) {
      throw ConfigError("key outside any section at line " + std::to_string(lineno));
    }
    bool saw = false;
    apply(in_case ? current : defaults, section, key, value, &saw);
    if (in_case) {
      case_saw_seed = case_saw_seed || saw;
    } else {
      defaults_saw_seed = defaults_saw_seed || saw;
    }
  }
  flush();
  if (cfg.cases.empty()) {
    // a config without [case] sections describes a single case
    if (!defaults_saw_seed) {
      throw ConfigError("no seed given ([transport] seed is required)");
    }
    validate(defaults);
    cfg.cases.push_back(defaults);
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

}  // namespace geosob::harness
