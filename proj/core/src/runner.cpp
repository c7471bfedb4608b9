#include "geosob/harness/runner.hpp"

#include <Eigen/Dense>

#include <atomic>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include "geosob/errors.hpp"
#include "geosob/num/quadrature.hpp"
#include "geosob/num/rng.hpp"
#include "geosob/potential/solver.hpp"
#include "geosob/submanifold/surface.hpp"
#include "geosob/submanifold/transport.hpp"
#include "geosob/transport/transport.hpp"

namespace geosob::harness {

namespace {

const TolerancePolicy kTol;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

models::WarpedModel model_from_config(const CaseConfig& c) {
  models::WarpedProfile profile;
  if (c.profile == "euclidean") {
    profile = models::euclidean_profile();
  } else if (c.profile == "cone_smoothed") {
    profile = models::cone_smoothed_profile(c.alpha);
  } else if (c.profile == "capped_paraboloid") {
    profile = models::capped_paraboloid_profile(c.alpha);
  } else if (c.profile == "spline") {
    std::ifstream in(c.spline_knots);
    if (!in) throw ConfigError("cannot open spline knot file: " + c.spline_knots);
    std::vector<double> rs, ps;
    double r, p;
    while (in >> r >> p) {
      rs.push_back(r);
      ps.push_back(p);
    }
    profile = models::spline_profile(rs, ps);
  } else {
    throw ConfigError("unknown profile: " + c.profile);
  }
  const auto cls = c.curvature == "sectional"
                       ? models::CurvatureClass::sectional_nonneg
                       : models::CurvatureClass::ricci_nonneg;
  return models::make_model(c.dim, std::move(profile), cls);
}

potential::RadialDensity density_from_config(const CaseConfig& c) {
  if (c.density == "constant") return potential::constant_density();
  if (c.density == "radial_poly") {
    if (c.coeffs.empty()) throw ConfigError("radial_poly needs density.coeffs");
    return potential::radial_poly_density(c.coeffs);
  }
  throw ConfigError("unknown density preset: " + c.density);
}

submanifold::ImmersedPatch patch_from_config(const CaseConfig& c) {
  std::shared_ptr<models::WarpedModel> model;
  if (c.patch == "warped_slice_disk") {
    model = std::make_shared<models::WarpedModel>(model_from_config(c));
  }
  auto patch = submanifold::patch_by_name(c.patch, c.k, model, c.slice_radius);
  if (patch.codim() == 1) patch = submanifold::lift_codim1(patch);
  return patch;
}

namespace {

struct DomainSides {
  double lhs = 0.0;    // int |grad f| + int_bdry f
  double power = 0.0;  // int f^{n/(n-1)}
};

DomainSides radial_sides(const models::WarpedModel& model,
                         const potential::RadialDensity& f,
                         const potential::GeoDomain& D) {
  const int n = model.dim;
  const double coeff = n * models::unit_ball_volume(n);
  const auto phi_pow = [&](double s) {
    return std::pow(model.profile.phi(s), n - 1);
  };
  DomainSides out;
  out.lhs = coeff * num::integrate_value(
      [&](double s) { return f.grad_mag(s) * phi_pow(s); }, D.R0, D.R1);
  out.lhs += f.value(D.R1) * coeff * phi_pow(D.R1);
  if (D.kind == potential::GeoDomain::Kind::geodesic_annulus) {
    out.lhs += f.value(D.R0) * coeff * phi_pow(D.R0);
  }
  out.power = coeff * num::integrate_value(
      [&](double s) { return f.power(s, n) * phi_pow(s); }, D.R0, D.R1);
  return out;
}

double sobolev_rhs(int n, double theta, double power_integral) {
  return n * std::pow(models::unit_ball_volume(n), 1.0 / n) *
         std::pow(theta, 1.0 / n) *
         std::pow(power_integral, double(n - 1) / n);
}

DomainSides mesh_sides(const potential::Mesh& mesh,
                       const potential::ChartMetric& metric,
                       const potential::RadialDensity& f, int n) {
  // density integrals evaluated with the mesh's own quadrature: the mesh
  // path carries its discretization error into the reported ratio
  DomainSides out;
  const auto tri_nodes = [&](const std::array<int, 3>& t) {
    std::array<Eigen::Vector2d, 3> v{mesh.vertices[t[0]], mesh.vertices[t[1]],
                                     mesh.vertices[t[2]]};
    return v;
  };
  for (const auto& t : mesh.triangles) {
    const auto v = tri_nodes(t);
    const double detJ =
        (v[1] - v[0]).x() * (v[2] - v[0]).y() -
        (v[1] - v[0]).y() * (v[2] - v[0]).x();
    // midpoint-type rule at the three edge midpoints (degree 2)
    const std::array<Eigen::Vector2d, 3> mids{0.5 * (v[0] + v[1]),
                                              0.5 * (v[1] + v[2]),
                                              0.5 * (v[2] + v[0])};
    for (const auto& xq : mids) {
      const double w = detJ / 6.0 * std::sqrt(metric.at(xq).determinant());
      const double r = xq.norm();
      out.lhs += w * f.grad_mag(r);
      out.power += w * f.power(r, n);
    }
  }
  for (const auto& e : mesh.boundary_edges) {
    const Eigen::Vector2d a = mesh.vertices[e[0]], b = mesh.vertices[e[1]];
    const Eigen::Vector2d mid = 0.5 * (a + b);
    const Eigen::Vector2d tau = b - a;
    const double len = std::sqrt(tau.dot(metric.at(mid) * tau));
    out.lhs += f.value(mid.norm()) * len;
  }
  return out;
}

void domain_equality_diagnostics(const models::WarpedModel& model,
                                 const potential::RadialPotential& sol,
                                 InequalityReport& row) {
  const int n = model.dim;
  double hess_res = 0.0, grad_res = 0.0;
  for (int i = 0; i < 1024; ++i) {
    const double r =
        sol.R0_bound() + (sol.R1_bound() - sol.R0_bound()) * (i + 0.5) / 1024.0;
    if (std::abs(sol.du(r)) >= 1.0) continue;
    const double c = sol.density().speed_scale(r, n);
    hess_res = std::max(hess_res, std::abs(sol.d2u(r) - c));
    hess_res = std::max(hess_res, std::abs(sol.hessian_tangential(r) - c));
    grad_res = std::max(grad_res, sol.density().grad_mag(r));
  }
  row.hessian_residual = hess_res;
  row.grad_f_residual = grad_res;
  row.ii_residual = 0.0;
}

InequalityReport domain_case_row(const CaseConfig& c, bool mesh_path) {
  InequalityReport row;
  row.case_id = c.id + (mesh_path ? "/mesh" : "/radial");
  row.theorem = c.theorem;
  row.seed = *c.seed;
  row.ode_tol = c.ode_tol;

  const models::WarpedModel model = model_from_config(c);
  row.n = model.dim;
  row.m = 0;
  row.theta = model.theta;

  potential::GeoDomain D =
      c.domain_kind == "geodesic_annulus"
          ? potential::GeoDomain::annulus(c.radius0, c.radius)
          : potential::GeoDomain::ball(c.radius);

  potential::RadialDensity f = density_from_config(c);
  if (c.theorem == "isoperimetric" && c.density != "constant") {
    throw ConfigError("isoperimetric cases require the constant density");
  }
  f = potential::normalize_density(f, D, model);

  const TolerancePolicy& tol = kTol;
  std::vector<std::string> violations;

  if (!mesh_path) {
    const potential::RadialPotential sol = potential::solve_radial(f, D, model);
    const DomainSides sides = radial_sides(model, f, D);
    row.lhs = sides.lhs;
    row.rhs = sobolev_rhs(row.n, row.theta, sides.power);
    row.ratio = row.lhs / row.rhs;
    row.tolerance = tol.radial_gate;
    row.h = 0.0;

    const auto lap = potential::laplacian_bound_check(sol);
    if (lap.min_margin < tol.laplacian_margin_radial) {
      violations.push_back("laplacian_bound margin " + fmt(lap.min_margin));
    }
    if (row.ratio < 1.0 - tol.radial_gate) {
      violations.push_back("sobolev ratio " + fmt(row.ratio));
    }
    if (std::abs(row.ratio - 1.0) <= tol.near_equality) {
      domain_equality_diagnostics(model, sol, row);
      const double gate = tol.rigidity_factor * tol.radial_gate;
      if (row.hessian_residual > gate || row.grad_f_residual > gate) {
        violations.push_back("rigidity residuals " + fmt(row.hessian_residual) +
                             "/" + fmt(row.grad_f_residual));
      }
    } else {
      row.note = "not near equality";
    }
  } else {
    if (model.dim != 2 || c.domain_kind != "geodesic_ball") {
      throw ConfigError("mesh path requires a dim-2 geodesic ball");
    }
    const potential::ChartMetric metric =
        c.profile == "euclidean" ? potential::euclidean_chart()
                                 : potential::warped_chart(model);
    auto mesh = std::make_shared<potential::Mesh>(
        potential::disk_mesh(c.radius, c.mesh_h, metric));
    const potential::GeoDomain DM = potential::GeoDomain::meshed(mesh);
    const potential::MeshPotential sol = potential::solve_mesh(f, DM, model);
    row.h = sol.h;
    row.tolerance = tol.mesh_gate(sol.h);

    const DomainSides sides = mesh_sides(*mesh, metric, f, row.n);
    row.lhs = sides.lhs;
    row.rhs = sobolev_rhs(row.n, row.theta, sides.power);
    row.ratio = row.lhs / row.rhs;

    const auto lap = potential::laplacian_bound_check(sol, row.n, metric);
    const double mesh_margin_gate = 10.0 * sol.h;
    if (lap.min_margin < -mesh_margin_gate) {
      violations.push_back("laplacian_bound margin " + fmt(lap.min_margin));
    }
    if (sol.residual_neumann > mesh_margin_gate) {
      violations.push_back("neumann flux residual " + fmt(sol.residual_neumann));
    }
    if (row.ratio < 1.0 - row.tolerance) {
      violations.push_back("sobolev ratio " + fmt(row.ratio));
    }
    if (std::abs(row.ratio - 1.0) <= tol.near_equality) {
      // rigidity residuals from the recovered Hessian
      double hess_res = 0.0;
      for (int v = 0; v < mesh->n_vertices(); ++v) {
        const Eigen::Vector2d x = mesh->vertices[v];
        if (x.norm() > c.radius * 0.9) continue;  // recovery degrades at the rim
        const Eigen::Matrix2d G = metric.at(x);
        const Eigen::Matrix2d Ginv = G.inverse();
        const Eigen::Vector2d du = sol.grad[v];
        if (du.dot(Ginv * du) >= 1.0) continue;
        Eigen::Matrix2d H = sol.hess_chart[v];
        if (!metric.flat) {
          const auto gamma = metric.christoffel(x);
          H -= gamma[0] * du[0] + gamma[1] * du[1];
        }
        const double cval = std::pow(sol.f_node[v], 1.0 / (row.n - 1));
        hess_res = std::max(hess_res, (H - cval * G).cwiseAbs().maxCoeff());
      }
      row.hessian_residual = hess_res;
      row.grad_f_residual = 0.0;
      for (int i = 0; i < 256; ++i) {
        row.grad_f_residual = std::max(
            row.grad_f_residual, f.grad_mag(c.radius * (i + 0.5) / 256.0));
      }
      row.ii_residual = 0.0;
      const double gate = tol.rigidity_factor * tol.mesh_tol(sol.h);
      if (row.hessian_residual > gate) {
        violations.push_back("rigidity hessian residual " +
                             fmt(row.hessian_residual));
      }
    } else {
      row.note = "not near equality";
    }
  }

  if (!violations.empty()) {
    row.status = "fail";
    std::string joined;
    for (const auto& v : violations) {
      if (!joined.empty()) joined += "; ";
      joined += v;
    }
    row.note = joined;
  }
  return row;
}

InequalityReport submanifold_case_row(const CaseConfig& c) {
  InequalityReport row;
  row.case_id = c.id;
  row.theorem = c.theorem;
  row.seed = *c.seed;
  row.ode_tol = c.ode_tol;

  submanifold::ImmersedPatch patch = patch_from_config(c);
  row.n = patch.n;
  row.m = patch.codim();
  row.theta = patch.is_warped_slice() ? patch.warped_ambient->theta : 1.0;

  if (c.density != "constant") {
    throw ConfigError("submanifold cases support the constant density");
  }
  submanifold::SurfaceDensity f = submanifold::constant_surface_density();
  f = submanifold::normalize_surface_density(patch, f);

  const TolerancePolicy& tol = kTol;
  std::vector<std::string> violations;

  const auto summary = submanifold::extrinsic_summary(patch);
  if (c.theorem == "minimal_isoperimetric") {
    if (summary.max_H > tol.minimal_H) {
      violations.push_back("patch not minimal, max |H| = " + fmt(summary.max_H));
    }
  }

  const auto ms = submanifold::ms_sides(patch, f, row.theta);
  row.lhs = ms.lhs;
  row.rhs = ms.rhs;
  row.ratio = ms.ratio;
  row.tolerance = tol.radial_gate;
  if (row.ratio < 1.0 - row.tolerance) {
    violations.push_back("michael-simon ratio " + fmt(row.ratio));
  }

  if (std::abs(row.ratio - 1.0) <= tol.near_equality) {
    row.ii_residual = summary.max_H;  // refined below when II data exists
    double ii_full = 0.0;
    for (const auto& node : patch.interior_quadrature(16)) {
      const auto geo = submanifold::extrinsic_geometry(patch, node.xi);
      double frob2 = 0.0;
      for (const auto& II : geo.II) frob2 += II.squaredNorm();
      ii_full = std::max(ii_full, std::sqrt(frob2));
    }
    row.ii_residual = ii_full;
    row.grad_f_residual = 0.0;  // constant density

    double hess_res = 0.0;
    if (patch.n == 2 && patch.domain.kind == submanifold::ParamDomain::Kind::disk) {
      const auto sol = submanifold::surface_potential(patch, f);
      row.h = sol.h;
      for (const auto& node : patch.interior_quadrature(12)) {
        const auto geo = submanifold::extrinsic_geometry(patch, node.xi);
        const Eigen::Matrix2d H = sol.hess_cov(node.xi);
        const double cval = std::pow(f.value(node.xi), 1.0 / (patch.n - 1));
        hess_res = std::max(
            hess_res,
            (H - cval * geo.g.topLeftCorner(2, 2)).cwiseAbs().maxCoeff());
      }
    }
    row.hessian_residual = hess_res;
    const double path_tol = row.h > 0.0 ? tol.mesh_tol(row.h) : tol.radial_gate;
    const double gate = tol.rigidity_factor * path_tol;
    if (row.hessian_residual > gate || row.ii_residual > gate) {
      violations.push_back("rigidity residuals hess=" + fmt(row.hessian_residual) +
                           " II=" + fmt(row.ii_residual));
    }
  } else {
    row.note = "not near equality";
  }

  if (!violations.empty()) {
    row.status = "fail";
    std::string joined;
    for (const auto& v : violations) {
      if (!joined.empty()) joined += "; ";
      joined += v;
    }
    row.note = joined;
  }
  return row;
}

}  // namespace

std::vector<InequalityReport> run_case(const CaseConfig& c) {
  std::vector<InequalityReport> rows;
  const bool domain_case =
      c.theorem == "sobolev_domain" || c.theorem == "isoperimetric";
  const auto guarded = [&](auto&& fn, const std::string& label) {
    try {
      rows.push_back(fn());
    } catch (const Error& e) {
      InequalityReport row;
      row.case_id = label;
      row.theorem = c.theorem;
      row.seed = c.seed.value_or(0);
      row.ode_tol = c.ode_tol;
      row.status = "fail";
      row.note = e.what();
      rows.push_back(std::move(row));
    }
  };
  if (domain_case) {
    if (c.solver == "radial" || c.solver == "both") {
      guarded([&] { return domain_case_row(c, false); }, c.id + "/radial");
    }
    if (c.solver == "mesh" || c.solver == "both") {
      guarded([&] { return domain_case_row(c, true); }, c.id + "/mesh");
    }
  } else {
    guarded([&] { return submanifold_case_row(c); }, c.id);
  }
  return rows;
}

std::vector<InequalityReport> run_batch(const ExperimentConfig& cfg,
                                        int threads) {
  const int n_cases = static_cast<int>(cfg.cases.size());
  std::vector<std::vector<InequalityReport>> results(n_cases);
  if (threads <= 1) {
    for (int i = 0; i < n_cases; ++i) results[i] = run_case(cfg.cases[i]);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    const int n_workers = std::min(threads, std::max(1, n_cases));
    pool.reserve(n_workers);
    for (int w = 0; w < n_workers; ++w) {
      pool.emplace_back([&] {
        for (int i = next.fetch_add(1); i < n_cases; i = next.fetch_add(1)) {
          results[i] = run_case(cfg.cases[i]);
        }
      });
    }
    for (auto& t : pool) t.join();
  }
  std::vector<InequalityReport> rows;
  for (auto& r : results) {
    rows.insert(rows.end(), r.begin(), r.end());
  }
  return rows;
}

std::vector<TransportRow> run_transport(const CaseConfig& c) {
  std::vector<TransportRow> rows;
  std::vector<double> r_list = c.r_list.empty() ? std::vector<double>{10.0}
                                                : c.r_list;
  std::vector<double> sigma_list =
      c.sigma_list.empty() ? std::vector<double>{0.0} : c.sigma_list;

  const bool domain_case = c.patch.empty();
  if (domain_case) {
    const models::WarpedModel model = model_from_config(c);
    potential::GeoDomain D =
        c.domain_kind == "geodesic_annulus"
            ? potential::GeoDomain::annulus(c.radius0, c.radius)
            : potential::GeoDomain::ball(c.radius);
    potential::RadialDensity f = density_from_config(c);
    f = potential::normalize_density(f, D, model);
    const potential::RadialPotential sol = potential::solve_radial(f, D, model);

    for (double r : r_list) {
      transport::TransportConfig tc;
      tc.r = r;
      tc.seed = *c.seed;
      tc.sample_count = static_cast<int>(std::min<long>(c.mc_budget, 1000));
      tc.ode_tol = c.ode_tol;
      const auto cov = transport::coverage_experiment(model, sol, D, tc);
      for (double sigma : sigma_list) {
        transport::TransportConfig cc = tc;
        cc.sigma = sigma;
        cc.sample_count = static_cast<int>(c.mc_budget);
        const auto cap = transport::capture_inequality(model, sol, D, cc);
        TransportRow row;
        row.r = r;
        row.sigma = sigma;
        row.lhs = cap.lhs_mc;
        row.lhs_stderr = cap.lhs_stderr;
        row.rhs = cap.rhs;
        row.slack = cap.slack;
        row.verified_fraction = cov.vacuous ? 0.0 : cov.fraction;
        row.seed = *c.seed;
        row.status = cap.status;
        rows.push_back(row);
      }
    }
  } else {
    submanifold::ImmersedPatch patch = patch_from_config(c);
    submanifold::SurfaceDensity f = submanifold::constant_surface_density();
    f = submanifold::normalize_surface_density(patch, f);
    const auto sol = submanifold::surface_potential(patch, f);
    for (double r : r_list) {
      for (double sigma : sigma_list) {
        const auto rep = submanifold::shell_capture(patch, sol, f, r, sigma,
                                                    c.mc_budget, *c.seed);
        TransportRow row;
        row.r = r;
        row.sigma = sigma;
        row.lhs = rep.lhs_mc;
        row.lhs_stderr = rep.lhs_stderr;
        row.rhs = rep.rhs;
        row.slack = rep.slack;
        row.seed = *c.seed;
        row.status = rep.status;

        // verified fraction of normal-transport contact samples
        if (!patch.is_warped_slice()) {
          int verified = 0;
          const int n_samp = 32;
          num::Philox rng(*c.seed, 9);
          int attempted = 0;
          for (int i = 0; i < n_samp; ++i) {
            const double rho = patch.domain.kind ==
                                       submanifold::ParamDomain::Kind::disk
                                   ? patch.domain.R * std::sqrt(rng.uniform()) * 0.95
                                   : 0.0;
            const double th = 2.0 * M_PI * rng.uniform();
            const Eigen::Vector2d xi =
                patch.domain.kind == submanifold::ParamDomain::Kind::disk
                    ? Eigen::Vector2d(rho * std::cos(th), rho * std::sin(th))
                    : Eigen::Vector2d(
                          c.radius0, 0.0);
            Eigen::VectorXd y(patch.codim());
            for (int j = 0; j < patch.codim(); ++j) y[j] = rng.normal();
            const Eigen::Vector2d du2 = sol.grad_param(xi);
            const double room = std::sqrt(std::max(
                0.0, 1.0 - du2.squaredNorm()));
            y *= 0.7 * room / (y.norm() + 1e-300);
            ++attempted;
            const auto verdict =
                submanifold::contact_test(patch, sol, xi, y, r);
            if (verdict.is_contact) ++verified;
          }
          row.verified_fraction =
              attempted > 0 ? double(verified) / attempted : 0.0;
        }
        rows.push_back(row);
      }
    }
  }
  return rows;
}

std::vector<ConvergenceRow> convergence_study(const CaseConfig& c, int levels) {
  if (levels < 3) throw ConfigError("convergence_study needs >= 3 levels");
  const models::WarpedModel model = model_from_config(c);
  if (model.dim != 2 || c.domain_kind != "geodesic_ball") {
    throw ConfigError("convergence_study runs on dim-2 geodesic balls");
  }
  potential::GeoDomain D = potential::GeoDomain::ball(c.radius);
  potential::RadialDensity f = density_from_config(c);
  f = potential::normalize_density(f, D, model);
  const potential::RadialPotential radial = potential::solve_radial(f, D, model);
  const DomainSides exact_sides = radial_sides(model, f, D);
  const double exact_ratio =
      exact_sides.lhs / sobolev_rhs(model.dim, model.theta, exact_sides.power);

  const potential::ChartMetric metric = c.profile == "euclidean"
                                            ? potential::euclidean_chart()
                                            : potential::warped_chart(model);
  std::vector<ConvergenceRow> rows;
  double h = c.mesh_h;
  for (int lvl = 0; lvl < levels; ++lvl, h *= 0.5) {
    auto mesh = std::make_shared<potential::Mesh>(
        potential::disk_mesh(c.radius, h, metric));
    const potential::GeoDomain DM = potential::GeoDomain::meshed(mesh);
    const potential::MeshPotential sol = potential::solve_mesh(f, DM, model);

    // weighted L2 errors against the radial oracle, after mean alignment
    double err2 = 0.0, gerr2 = 0.0, area = 0.0, mean_diff = 0.0;
    std::vector<double> node_exact(mesh->n_vertices());
    std::vector<double> node_w(mesh->n_vertices(), 0.0);
    for (int v = 0; v < mesh->n_vertices(); ++v) {
      node_exact[v] = radial.u(mesh->vertices[v].norm());
    }
    for (const auto& t : mesh->triangles) {
      const Eigen::Vector2d centroid =
          (mesh->vertices[t[0]] + mesh->vertices[t[1]] + mesh->vertices[t[2]]) / 3.0;
      const double a2 =
          0.5 * std::abs((mesh->vertices[t[1]] - mesh->vertices[t[0]])
                             .x() * (mesh->vertices[t[2]] - mesh->vertices[t[0]]).y() -
                         (mesh->vertices[t[1]] - mesh->vertices[t[0]]).y() *
                             (mesh->vertices[t[2]] - mesh->vertices[t[0]]).x()) *
          std::sqrt(metric.at(centroid).determinant());
      for (int e = 0; e < 3; ++e) node_w[t[e]] += a2 / 3.0;
    }
    for (int v = 0; v < mesh->n_vertices(); ++v) {
      mean_diff += node_w[v] * (sol.u[v] - node_exact[v]);
      area += node_w[v];
    }
    mean_diff /= area;
    for (int v = 0; v < mesh->n_vertices(); ++v) {
      const double d = sol.u[v] - node_exact[v] - mean_diff;
      err2 += node_w[v] * d * d;
      const Eigen::Vector2d x = mesh->vertices[v];
      const double r = x.norm();
      Eigen::Vector2d gex = Eigen::Vector2d::Zero();
      if (r > 1e-12) gex = radial.du(r) * x / r;
      gerr2 += node_w[v] * (sol.grad[v] - gex).squaredNorm();
    }

    const DomainSides sides = mesh_sides(*mesh, metric, f, model.dim);
    const double ratio =
        sides.lhs / sobolev_rhs(model.dim, model.theta, sides.power);

    ConvergenceRow row;
    row.h = sol.h;
    row.err_u = std::sqrt(err2 / area);
    row.err_grad = std::sqrt(gerr2 / area);
    row.ratio_dev = std::abs(ratio - exact_ratio);
    if (!rows.empty()) {
      row.order_u = std::log2(rows.back().err_u / row.err_u) /
                    std::log2(rows.back().h / row.h);
      row.order_grad = std::log2(rows.back().err_grad / row.err_grad) /
                       std::log2(rows.back().h / row.h);
    }
    rows.push_back(row);
  }
  return rows;
}

std::string convergence_csv(const std::vector<ConvergenceRow>& rows) {
  std::ostringstream out;
  out << "h,err_u,err_grad,order_u,order_grad,ratio_dev\n";
  out.precision(17);
  for (const auto& r : rows) {
    out << r.h << ',' << r.err_u << ',' << r.err_grad << ',' << r.order_u
        << ',' << r.order_grad << ',' << r.ratio_dev << '\n';
  }
  return out.str();
}

}  // namespace geosob::harness
