#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cmath>
#include <map>
#include <set>

#include "geosob/errors.hpp"
#include "geosob/potential/solver.hpp"

namespace geosob::potential {

namespace {

// degree-5 triangle rule, barycentric points and weights (sum 1)
struct TriRule {
  std::array<Eigen::Vector3d, 7> pts;
  std::array<double, 7> w;
};

TriRule tri_rule7() {
  TriRule r;
  const double a1 = 0.059715871789770, b1 = 0.470142064105115;
  const double a2 = 0.797426985353087, b2 = 0.101286507323456;
  const double w0 = 0.225, w1 = 0.132394152788506, w2 = 0.125939180544827;
  r.pts[0] = {1.0 / 3, 1.0 / 3, 1.0 / 3};
  r.w[0] = w0;
  r.pts[1] = {a1, b1, b1};
  r.pts[2] = {b1, a1, b1};
  r.pts[3] = {b1, b1, a1};
  r.w[1] = r.w[2] = r.w[3] = w1;
  r.pts[4] = {a2, b2, b2};
  r.pts[5] = {b2, a2, b2};
  r.pts[6] = {b2, b2, a2};
  r.w[4] = r.w[5] = r.w[6] = w2;
  return r;
}

constexpr double kGauss3Nodes[3] = {0.1127016653792583, 0.5, 0.8872983346207417};
constexpr double kGauss3Weights[3] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};

}  // namespace

ChartField chart_field_from_radial(const RadialDensity& f) {
  ChartField cf;
  cf.value = [f](const Eigen::Vector2d& x) { return f.value(x.norm()); };
  cf.grad = [f](const Eigen::Vector2d& x) -> Eigen::Vector2d {
    const double r = x.norm();
    if (r < 1e-12) return Eigen::Vector2d::Zero();
    return f.deriv(r) * x / r;
  };
  return cf;
}

MeshPotential solve_mesh_weak(
    const Mesh& mesh, const ChartMetric& metric, const ChartField& f,
    const std::function<double(const Eigen::Vector2d&)>& rhs,
    const std::function<double(const Eigen::Vector2d&)>& neumann,
    const FemOptions& opts) {
  const double min_angle = mesh.min_metric_angle_deg(metric);
  if (min_angle < opts.min_angle_deg) {
    throw MeshError("mesh quality too low: min metric angle " +
                    std::to_string(min_angle) + " deg");
  }
  const int N = mesh.n_vertices();
  const TriRule rule = tri_rule7();

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(mesh.triangles.size() * 12 + 2 * N);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(N + 1);
  Eigen::VectorXd mean_vec = Eigen::VectorXd::Zero(N);
  double load_scale = 0.0;

  for (const auto& t : mesh.triangles) {
    const Eigen::Vector2d a = mesh.vertices[t[0]];
    const Eigen::Vector2d bb = mesh.vertices[t[1]];
    const Eigen::Vector2d c = mesh.vertices[t[2]];
    Eigen::Matrix2d J;
    J.col(0) = bb - a;
    J.col(1) = c - a;
    const double detJ = J.determinant();  // = 2 * chart area (CCW)

    // chart gradients of the P1 shape functions (constant per triangle)
    Eigen::Matrix2d Jinv = J.inverse();
    Eigen::Matrix<double, 2, 3> gradB;
    gradB.col(1) = Jinv.row(0);
    gradB.col(2) = Jinv.row(1);
    gradB.col(0) = -gradB.col(1) - gradB.col(2);

    Eigen::Matrix3d Ke = Eigen::Matrix3d::Zero();
    Eigen::Vector3d be = Eigen::Vector3d::Zero();
    Eigen::Vector3d me = Eigen::Vector3d::Zero();
    for (int q = 0; q < 7; ++q) {
      const Eigen::Vector3d l = rule.pts[q];
      const Eigen::Vector2d xq = l[0] * a + l[1] * bb + l[2] * c;
      const Eigen::Matrix2d G = metric.at(xq);
      const double sq = std::sqrt(G.determinant());
      const Eigen::Matrix2d Ginv = G.inverse();
      const double wq = rule.w[q] * 0.5 * detJ * sq;
      const double fq = f.value(xq);
      Ke += (wq * fq) * gradB.transpose() * Ginv * gradB;
      const double rq = rhs(xq);
      for (int i = 0; i < 3; ++i) {
        be[i] -= wq * rq * l[i];
        me[i] += wq * l[i];
      }
    }
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) trips.emplace_back(t[i], t[j], Ke(i, j));
      b[t[i]] += be[i];
      mean_vec[t[i]] += me[i];
      load_scale += std::abs(be[i]);
    }
  }

  for (const auto& e : mesh.boundary_edges) {
    const Eigen::Vector2d a = mesh.vertices[e[0]];
    const Eigen::Vector2d c = mesh.vertices[e[1]];
    for (int q = 0; q < 3; ++q) {
      const double s = kGauss3Nodes[q];
      const Eigen::Vector2d xq = (1.0 - s) * a + s * c;
      const Eigen::Vector2d tau = c - a;
      const double len = std::sqrt(tau.dot(metric.at(xq) * tau));
      const double wq = kGauss3Weights[q] * len * neumann(xq);
      b[e[0]] += wq * (1.0 - s);
      b[e[1]] += wq * s;
      load_scale += std::abs(wq);
    }
  }

  // Neumann compatibility: the load against the constant function vanishes
  // exactly when the density is normalized
  const double compat = std::abs(b.head(N).sum());
  const double hsize = mesh.chart_mesh_size();
  const double compat_tol =
      std::max(opts.compat_rel_tol, opts.compat_h2_factor * hsize * hsize);
  if (compat > compat_tol * (load_scale + 1e-300)) {
    throw Error("unnormalized density: Neumann compatibility residual " +
                std::to_string(compat / (load_scale + 1e-300)));
  }

  for (int i = 0; i < N; ++i) {
    trips.emplace_back(i, N, mean_vec[i]);
    trips.emplace_back(N, i, mean_vec[i]);
  }
  Eigen::SparseMatrix<double> A(N + 1, N + 1);
  A.setFromTriplets(trips.begin(), trips.end());
  A.makeCompressed();

  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success) {
    throw Error("mesh potential: singular system");
  }
  const Eigen::VectorXd x = lu.solve(b);

  MeshPotential sol;
  sol.mesh = std::make_shared<Mesh>(mesh);
  sol.metric = metric;
  sol.u = x.head(N);
  sol.h = mesh.chart_mesh_size();
  sol.residual_algebraic =
      (A * x - b).cwiseAbs().maxCoeff() / (b.cwiseAbs().maxCoeff() + 1e-300);
  sol.compatibility_residual = compat / (load_scale + 1e-300);

  sol.f_node.resize(N);
  for (int i = 0; i < N; ++i) sol.f_node[i] = f.value(mesh.vertices[i]);

  // --- patchwise least-squares gradient recovery -------------------------
  std::vector<std::set<int>> ring(N);
  for (const auto& t : mesh.triangles) {
    for (int i = 0; i < 3; ++i) {
      ring[t[i]].insert(t[(i + 1) % 3]);
      ring[t[i]].insert(t[(i + 2) % 3]);
    }
  }
  auto patch_of = [&](int v) {
    std::set<int> patch = ring[v];
    patch.insert(v);
    if (patch.size() < 6) {
      for (int w : ring[v]) patch.insert(ring[w].begin(), ring[w].end());
    }
    return patch;
  };
  auto fit_linear = [&](int v, const auto& value_at) -> Eigen::Vector3d {
    const auto patch = patch_of(v);
    Eigen::MatrixXd M(patch.size(), 3);
    Eigen::VectorXd y(patch.size());
    int row = 0;
    for (int w : patch) {
      const Eigen::Vector2d d = mesh.vertices[w] - mesh.vertices[v];
      M(row, 0) = 1.0;
      M(row, 1) = d.x();
      M(row, 2) = d.y();
      y[row] = value_at(w);
      ++row;
    }
    return (M.transpose() * M).ldlt().solve(M.transpose() * y);
  };

  sol.grad.resize(N);
  for (int v = 0; v < N; ++v) {
    const Eigen::Vector3d c = fit_linear(v, [&](int w) { return sol.u[w]; });
    sol.grad[v] = {c[1], c[2]};
  }
  sol.hess_chart.resize(N);
  for (int v = 0; v < N; ++v) {
    const Eigen::Vector3d cx =
        fit_linear(v, [&](int w) { return sol.grad[w].x(); });
    const Eigen::Vector3d cy =
        fit_linear(v, [&](int w) { return sol.grad[w].y(); });
    Eigen::Matrix2d H;
    H << cx[1], 0.5 * (cx[2] + cy[1]), 0.5 * (cx[2] + cy[1]), cy[2];
    sol.hess_chart[v] = H;
  }

  // --- boundary flux check -----------------------------------------------
  std::map<std::pair<int, int>, int> edge_tri;
  for (int ti = 0; ti < (int)mesh.triangles.size(); ++ti) {
    const auto& t = mesh.triangles[ti];
    for (int e = 0; e < 3; ++e) {
      edge_tri[{std::min(t[e], t[(e + 1) % 3]), std::max(t[e], t[(e + 1) % 3])}] = ti;
    }
  }
  double flux_res = 0.0;
  for (const auto& e : mesh.boundary_edges) {
    const auto it = edge_tri.find({std::min(e[0], e[1]), std::max(e[0], e[1])});
    if (it == edge_tri.end()) continue;
    const auto& t = mesh.triangles[it->second];
    const Eigen::Vector2d a = mesh.vertices[t[0]];
    Eigen::Matrix2d J;
    J.col(0) = mesh.vertices[t[1]] - a;
    J.col(1) = mesh.vertices[t[2]] - a;
    Eigen::Matrix2d Jinv = J.inverse();
    Eigen::Matrix<double, 2, 3> gradB;
    gradB.col(1) = Jinv.row(0);
    gradB.col(2) = Jinv.row(1);
    gradB.col(0) = -gradB.col(1) - gradB.col(2);
    const Eigen::Vector2d du = gradB.col(0) * sol.u[t[0]] +
                               gradB.col(1) * sol.u[t[1]] +
                               gradB.col(2) * sol.u[t[2]];
    const Eigen::Vector2d mid =
        0.5 * (mesh.vertices[e[0]] + mesh.vertices[e[1]]);
    const Eigen::Vector2d tau = mesh.vertices[e[1]] - mesh.vertices[e[0]];
    Eigen::Vector2d nrm(tau.y(), -tau.x());  // outward for CCW boundary
    const Eigen::Matrix2d Ginv = metric.at(mid).inverse();
    const double flux =
        du.dot(Ginv * nrm) / std::sqrt(nrm.dot(Ginv * nrm));
    flux_res = std::max(flux_res, std::abs(flux - 1.0));
  }
  sol.residual_neumann = flux_res;
  return sol;
}

MeshPotential solve_mesh(const RadialDensity& f, const GeoDomain& D,
                         const models::WarpedModel& model,
                         const FemOptions& opts) {
  if (model.dim != 2) throw Error("solve_mesh requires a dim 2 model");
  std::shared_ptr<Mesh> mesh = D.mesh;
  if (D.kind != GeoDomain::Kind::meshed_region || !mesh) {
    throw Error("solve_mesh requires a meshed region");
  }
  const ChartMetric metric = model.profile.name == "euclidean"
                                 ? euclidean_chart()
                                 : warped_chart(model);
  const ChartField ff = chart_field_from_radial(f);
  const int n = model.dim;
  const auto rhs = [f, n](const Eigen::Vector2d& x) {
    const double r = x.norm();
    return n * f.power(r, n) - f.grad_mag(r);
  };
  const auto neumann = [f](const Eigen::Vector2d& x) {
    return f.value(x.norm());
  };
  return solve_mesh_weak(*mesh, metric, ff, rhs, neumann, opts);
}

double MeshPotential::value(const Eigen::Vector2d& x) const {
  const int t = mesh->locate(x);
  if (t < 0) throw Error("MeshPotential: query point outside the mesh");
  const Eigen::Vector3d l = mesh->barycentric(t, x);
  const auto& tri = mesh->triangles[t];
  return l[0] * u[tri[0]] + l[1] * u[tri[1]] + l[2] * u[tri[2]];
}

Eigen::Vector2d MeshPotential::gradient(const Eigen::Vector2d& x) const {
  const int t = mesh->locate(x);
  if (t < 0) throw Error("MeshPotential: query point outside the mesh");
  const Eigen::Vector3d l = mesh->barycentric(t, x);
  const auto& tri = mesh->triangles[t];
  return l[0] * grad[tri[0]] + l[1] * grad[tri[1]] + l[2] * grad[tri[2]];
}

Eigen::Matrix2d MeshPotential::hessian_chart(const Eigen::Vector2d& x) const {
  const int t = mesh->locate(x);
  if (t < 0) throw Error("MeshPotential: query point outside the mesh");
  const Eigen::Vector3d l = mesh->barycentric(t, x);
  const auto& tri = mesh->triangles[t];
  return l[0] * hess_chart[tri[0]] + l[1] * hess_chart[tri[1]] +
         l[2] * hess_chart[tri[2]];
}

Eigen::Matrix2d MeshPotential::hessian_covariant(const Eigen::Vector2d& x) const {
  Eigen::Matrix2d H = hessian_chart(x);
  if (!metric.flat) {
    const auto gamma = metric.christoffel(x);
    const Eigen::Vector2d du = gradient(x);
    H -= gamma[0] * du[0] + gamma[1] * du[1];
  }
  return H;
}

double MeshPotential::grad_norm(const Eigen::Vector2d& x) const {
  const Eigen::Vector2d du = gradient(x);
  const Eigen::Matrix2d Ginv = metric.at(x).inverse();
  return std::sqrt(du.dot(Ginv * du));
}

double MeshPotential::laplacian(const Eigen::Vector2d& x) const {
  const Eigen::Matrix2d Ginv = metric.at(x).inverse();
  return (Ginv * hessian_covariant(x)).trace();
}

LaplacianMargin laplacian_bound_check(const MeshPotential& sol, int n,
                                      const ChartMetric& metric) {
  LaplacianMargin m;
  m.min_margin = std::numeric_limits<double>::infinity();
  std::set<int> bdry;
  for (const auto& e : sol.mesh->boundary_edges) {
    bdry.insert(e[0]);
    bdry.insert(e[1]);
  }
  for (int v = 0; v < sol.mesh->n_vertices(); ++v) {
    if (bdry.count(v)) continue;
    const Eigen::Vector2d x = sol.mesh->vertices[v];
    const Eigen::Vector2d du = sol.grad[v];
    const Eigen::Matrix2d Ginv = metric.at(x).inverse();
    if (du.dot(Ginv * du) >= 1.0) continue;
    ++m.points_in_U;
    Eigen::Matrix2d H = sol.hess_chart[v];
    if (!metric.flat) {
      const auto gamma = metric.christoffel(x);
      H -= gamma[0] * du[0] + gamma[1] * du[1];
    }
    const double lap = (Ginv * H).trace();
    const double margin =
        n * std::pow(sol.f_node[v], 1.0 / (n - 1)) - lap;
    if (margin < m.min_margin) {
      m.min_margin = margin;
      m.argmin_r = x.norm();
    }
  }
  return m;
}

}  // namespace geosob::potential
