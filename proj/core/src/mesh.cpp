#include "geosob/potential/mesh.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "geosob/errors.hpp"

namespace geosob::potential {

std::array<Eigen::Matrix2d, 2> ChartMetric::christoffel(
    const Eigen::Vector2d& x) const {
  std::array<Eigen::Matrix2d, 2> gamma{Eigen::Matrix2d::Zero(),
                                       Eigen::Matrix2d::Zero()};
  if (flat || !dG) return gamma;
  const Eigen::Matrix2d g = G(x);
  const Eigen::Matrix2d ginv = g.inverse();
  const auto dg = dG(x);
  for (int c = 0; c < 2; ++c) {
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        double sum = 0.0;
        for (int d = 0; d < 2; ++d) {
          sum += ginv(c, d) * (dg[a](b, d) + dg[b](a, d) - dg[d](a, b));
        }
        gamma[c](a, b) = 0.5 * sum;
      }
    }
  }
  return gamma;
}

ChartMetric euclidean_chart() {
  ChartMetric m;
  m.flat = true;
  m.G = [](const Eigen::Vector2d&) { return Eigen::Matrix2d::Identity(); };
  m.dG = [](const Eigen::Vector2d&) {
    return std::array<Eigen::Matrix2d, 2>{Eigen::Matrix2d::Zero(),
                                          Eigen::Matrix2d::Zero()};
  };
  return m;
}

ChartMetric warped_chart(const models::WarpedModel& model) {
  if (model.dim != 2) {
    throw Error("warped_chart: mesh solving is restricted to dim 2 models");
  }
  const auto profile = model.profile;  // copy of the callable bundle
  ChartMetric m;
  m.flat = false;
  // G = q I + (1-q) xhat xhat^T with q = (phi(r)/r)^2
  m.G = [profile](const Eigen::Vector2d& x) {
    const double r = x.norm();
    if (r < 1e-9) return Eigen::Matrix2d::Identity().eval();
    const double s = profile.phi(r) / r;
    const double q = s * s;
    const Eigen::Vector2d xh = x / r;
    return (q * Eigen::Matrix2d::Identity() + (1.0 - q) * xh * xh.transpose())
        .eval();
  };
  m.dG = [profile](const Eigen::Vector2d& x) {
    std::array<Eigen::Matrix2d, 2> d{Eigen::Matrix2d::Zero(),
                                     Eigen::Matrix2d::Zero()};
    const double r = x.norm();
    if (r < 1e-9) return d;
    const double phi = profile.phi(r);
    const double dphi = profile.dphi(r);
    const double s = phi / r;
    const double q = s * s;
    const double dq = 2.0 * phi * (dphi * r - phi) / (r * r * r);
    const Eigen::Vector2d xh = x / r;
    for (int c = 0; c < 2; ++c) {
      const double drc = xh[c];
      for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
          const double dxh =
              ((a == c ? 1.0 : 0.0) * x[b] + (b == c ? 1.0 : 0.0) * x[a]) /
                  (r * r) -
              2.0 * x[a] * x[b] * x[c] / (r * r * r * r);
          d[c](a, b) = dq * drc * ((a == b ? 1.0 : 0.0) - xh[a] * xh[b]) +
                       (1.0 - q) * dxh;
        }
      }
    }
    return d;
  };
  return m;
}

double Mesh::chart_mesh_size() const {
  double h = 0.0;
  for (const auto& t : triangles) {
    for (int e = 0; e < 3; ++e) {
      h = std::max(h, (vertices[t[e]] - vertices[t[(e + 1) % 3]]).norm());
    }
  }
  return h;
}

double Mesh::min_metric_angle_deg(const ChartMetric& metric) const {
  double min_angle = 180.0;
  for (const auto& t : triangles) {
    const Eigen::Vector2d c =
        (vertices[t[0]] + vertices[t[1]] + vertices[t[2]]) / 3.0;
    const Eigen::Matrix2d g = metric.at(c);
    for (int v = 0; v < 3; ++v) {
      const Eigen::Vector2d e1 = vertices[t[(v + 1) % 3]] - vertices[t[v]];
      const Eigen::Vector2d e2 = vertices[t[(v + 2) % 3]] - vertices[t[v]];
      const double num = e1.dot(g * e2);
      const double den =
          std::sqrt(e1.dot(g * e1)) * std::sqrt(e2.dot(g * e2));
      const double ang =
          std::acos(std::clamp(num / den, -1.0, 1.0)) * 180.0 / M_PI;
      min_angle = std::min(min_angle, ang);
    }
  }
  return min_angle;
}

void Mesh::build_locator() {
  auto loc = std::make_shared<Locator>();
  Eigen::Vector2d lo = vertices[0], hi = vertices[0];
  for (const auto& v : vertices) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  const double span = std::max((hi - lo).maxCoeff(), 1e-12);
  const int n_cells = std::max(4, (int)std::sqrt((double)triangles.size()));
  loc->cell = span / n_cells;
  loc->x0 = lo.x() - 0.5 * loc->cell;
  loc->y0 = lo.y() - 0.5 * loc->cell;
  loc->nx = (int)((hi.x() - loc->x0) / loc->cell) + 2;
  loc->ny = (int)((hi.y() - loc->y0) / loc->cell) + 2;
  loc->bins.assign((std::size_t)loc->nx * loc->ny, {});
  for (int ti = 0; ti < (int)triangles.size(); ++ti) {
    const auto& t = triangles[ti];
    Eigen::Vector2d tlo = vertices[t[0]], thi = vertices[t[0]];
    for (int v = 1; v < 3; ++v) {
      tlo = tlo.cwiseMin(vertices[t[v]]);
      thi = thi.cwiseMax(vertices[t[v]]);
    }
    const int ix0 = std::max(0, (int)((tlo.x() - loc->x0) / loc->cell));
    const int iy0 = std::max(0, (int)((tlo.y() - loc->y0) / loc->cell));
    const int ix1 = std::min(loc->nx - 1, (int)((thi.x() - loc->x0) / loc->cell));
    const int iy1 = std::min(loc->ny - 1, (int)((thi.y() - loc->y0) / loc->cell));
    for (int ix = ix0; ix <= ix1; ++ix) {
      for (int iy = iy0; iy <= iy1; ++iy) {
        loc->bins[(std::size_t)iy * loc->nx + ix].push_back(ti);
      }
    }
  }
  locator_ = std::move(loc);
}

Eigen::Vector3d Mesh::barycentric(int tri, const Eigen::Vector2d& x) const {
  const auto& t = triangles[tri];
  const Eigen::Vector2d a = vertices[t[0]], b = vertices[t[1]],
                        c = vertices[t[2]];
  Eigen::Matrix2d M;
  M.col(0) = b - a;
  M.col(1) = c - a;
  const Eigen::Vector2d lam = M.inverse() * (x - a);
  return {1.0 - lam[0] - lam[1], lam[0], lam[1]};
}

int Mesh::locate(const Eigen::Vector2d& x) const {
  const double tol = -1e-11;
  if (locator_) {
    const int ix = (int)((x.x() - locator_->x0) / locator_->cell);
    const int iy = (int)((x.y() - locator_->y0) / locator_->cell);
    if (ix >= 0 && iy >= 0 && ix < locator_->nx && iy < locator_->ny) {
      for (int ti : locator_->bins[(std::size_t)iy * locator_->nx + ix]) {
        const Eigen::Vector3d l = barycentric(ti, x);
        if (l.minCoeff() >= tol) return ti;
      }
    }
    // fall through to the exhaustive scan (points near bin borders)
  }
  for (int ti = 0; ti < (int)triangles.size(); ++ti) {
    const Eigen::Vector3d l = barycentric(ti, x);
    if (l.minCoeff() >= tol) return ti;
  }
  return -1;
}

Mesh disk_mesh(double R, double h, const ChartMetric& metric) {
  if (!(R > 0.0) || !(h > 0.0) || h > R) {
    throw MeshError("disk_mesh: need 0 < h <= R");
  }
  const int n_rings = std::max(2, (int)std::lround(R / h));

  Mesh mesh;
  mesh.vertices.emplace_back(0.0, 0.0);
  std::vector<std::vector<int>> ring_ids(n_rings + 1);
  ring_ids[0] = {0};

  auto circumference = [&](double r) {
    // metric length of the chart circle of radius r
    const int probes = 8;
    double len = 0.0;
    for (int i = 0; i < probes; ++i) {
      const double th = 2.0 * M_PI * (i + 0.5) / probes;
      const Eigen::Vector2d x(r * std::cos(th), r * std::sin(th));
      const Eigen::Vector2d tau(-std::sin(th), std::cos(th));
      len += std::sqrt(tau.dot(metric.at(x) * tau)) * (2.0 * M_PI * r / probes);
    }
    return len;
  };

  for (int j = 1; j <= n_rings; ++j) {
    const double r = R * double(j) / double(n_rings);
    const int m = std::max(6, (int)std::lround(circumference(r) / h));
    ring_ids[j].resize(m);
    for (int i = 0; i < m; ++i) {
      const double th = 2.0 * M_PI * double(i) / double(m);
      ring_ids[j][i] = mesh.n_vertices();
      mesh.vertices.emplace_back(r * std::cos(th), r * std::sin(th));
    }
  }

  auto add_tri = [&](int a, int b, int c) {
    const Eigen::Vector2d ab = mesh.vertices[b] - mesh.vertices[a];
    const Eigen::Vector2d ac = mesh.vertices[c] - mesh.vertices[a];
    if (ab.x() * ac.y() - ab.y() * ac.x() < 0.0) std::swap(b, c);
    mesh.triangles.push_back({a, b, c});
  };

  // central fan
  for (int i = 0; i < (int)ring_ids[1].size(); ++i) {
    const int next = (i + 1) % ring_ids[1].size();
    add_tri(0, ring_ids[1][i], ring_ids[1][next]);
  }

  // strips, two-pointer sweep by angle
  for (int j = 1; j < n_rings; ++j) {
    const auto& inner = ring_ids[j];
    const auto& outer = ring_ids[j + 1];
    const int ma = (int)inner.size(), mb = (int)outer.size();
    int ia = 0, ib = 0;
    while (ia < ma || ib < mb) {
      const double next_a = 2.0 * M_PI * double(ia + 1) / double(ma);
      const double next_b = 2.0 * M_PI * double(ib + 1) / double(mb);
      if (ib >= mb || (ia < ma && next_a <= next_b)) {
        add_tri(inner[ia % ma], outer[ib % mb], inner[(ia + 1) % ma]);
        ++ia;
      } else {
        add_tri(inner[ia % ma], outer[ib % mb], outer[(ib + 1) % mb]);
        ++ib;
      }
    }
  }

  const auto& rim = ring_ids[n_rings];
  for (int i = 0; i < (int)rim.size(); ++i) {
    mesh.boundary_edges.push_back({rim[i], rim[(i + 1) % rim.size()]});
  }
  mesh.build_locator();
  return mesh;
}

void save_mesh(const Mesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw MeshError("save_mesh: cannot open " + path);
  out.precision(17);
  out << "# vertices " << mesh.vertices.size() << "\n";
  for (const auto& v : mesh.vertices) out << v.x() << " " << v.y() << "\n";
  out << "# triangles " << mesh.triangles.size() << "\n";
  for (const auto& t : mesh.triangles)
    out << t[0] << " " << t[1] << " " << t[2] << "\n";
}

Mesh load_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MeshError("load_mesh: cannot open " + path);
  std::string tag;
  std::size_t n = 0;
  Mesh mesh;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream hs(line.substr(1));
      hs >> tag >> n;
      continue;
    }
    std::istringstream ls(line);
    if (tag == "vertices") {
      double x, y;
      ls >> x >> y;
      mesh.vertices.emplace_back(x, y);
    } else if (tag == "triangles") {
      int a, b, c;
      ls >> a >> b >> c;
      mesh.triangles.push_back({a, b, c});
    }
  }
  if (mesh.vertices.empty() || mesh.triangles.empty()) {
    throw MeshError("load_mesh: no usable data in " + path);
  }
  // boundary = edges incident to exactly one triangle
  std::map<std::pair<int, int>, int> edge_count;
  std::map<std::pair<int, int>, std::pair<int, int>> oriented;
  for (const auto& t : mesh.triangles) {
    for (int e = 0; e < 3; ++e) {
      const int a = t[e], b = t[(e + 1) % 3];
      edge_count[{std::min(a, b), std::max(a, b)}]++;
      oriented[{std::min(a, b), std::max(a, b)}] = {a, b};
    }
  }
  for (const auto& [key, cnt] : edge_count) {
    if (cnt == 1) {
      const auto [a, b] = oriented[key];
      mesh.boundary_edges.push_back({a, b});
    }
  }
  mesh.build_locator();
  return mesh;
}

}  // namespace geosob::potential
