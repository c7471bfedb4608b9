#include "geosob/submanifold/patch.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <complex>

#include "geosob/errors.hpp"
#include "geosob/num/gauss.hpp"
#include "geosob/potential/mesh.hpp"

namespace geosob::submanifold {

namespace {

int default_level(const ParamDomain& d) {
  switch (d.kind) {
    case ParamDomain::Kind::disk: return 64;
    case ParamDomain::Kind::rectangle: return 64;
    case ParamDomain::Kind::interval: return 384;
  }
  return 64;
}

}  // namespace

std::vector<QuadNode> ImmersedPatch::interior_quadrature(int level) const {
  if (level <= 0) level = default_level(domain);
  std::vector<QuadNode> nodes;
  switch (domain.kind) {
    case ParamDomain::Kind::disk: {
      const auto [xr, wr] = num::gauss_legendre(level, 0.0, domain.R);
      const int ntheta = 2 * level;
      const double dth = 2.0 * M_PI / ntheta;
      nodes.reserve(level * ntheta);
      for (int i = 0; i < level; ++i) {
        for (int j = 0; j < ntheta; ++j) {
          const double th = dth * j;
          nodes.push_back({{xr[i] * std::cos(th), xr[i] * std::sin(th)},
                           wr[i] * xr[i] * dth});
        }
      }
      break;
    }
    case ParamDomain::Kind::rectangle: {
      const auto [xa, wa] = num::gauss_legendre(level, domain.a0, domain.a1);
      if (domain.periodic_b) {
        const int nb = 2 * level;
        const double db = (domain.b1 - domain.b0) / nb;
        for (int i = 0; i < level; ++i) {
          for (int j = 0; j < nb; ++j) {
            nodes.push_back({{xa[i], domain.b0 + db * j}, wa[i] * db});
          }
        }
      } else {
        const auto [xb, wb] = num::gauss_legendre(level, domain.b0, domain.b1);
        for (int i = 0; i < level; ++i) {
          for (int j = 0; j < level; ++j) {
            nodes.push_back({{xa[i], xb[j]}, wa[i] * wb[j]});
          }
        }
      }
      break;
    }
    case ParamDomain::Kind::interval: {
      const auto [xs, ws] = num::gauss_legendre(level, domain.a0, domain.a1);
      for (int i = 0; i < level; ++i) nodes.push_back({{xs[i], 0.0}, ws[i]});
      break;
    }
  }
  return nodes;
}

std::vector<BoundaryNode> ImmersedPatch::boundary_quadrature(int level) const {
  if (level <= 0) level = 4 * default_level(domain);
  std::vector<BoundaryNode> nodes;
  switch (domain.kind) {
    case ParamDomain::Kind::disk: {
      const double dth = 2.0 * M_PI / level;
      for (int j = 0; j < level; ++j) {
        const double th = dth * j;
        nodes.push_back({{domain.R * std::cos(th), domain.R * std::sin(th)},
                         dth,
                         {-domain.R * std::sin(th), domain.R * std::cos(th)}});
      }
      break;
    }
    case ParamDomain::Kind::rectangle: {
      const int m = level / 2;
      if (domain.periodic_b) {
        // the two b-circles at a0 and a1
        const double db = (domain.b1 - domain.b0) / m;
        for (int j = 0; j < m; ++j) {
          const double b = domain.b0 + db * j;
          nodes.push_back({{domain.a0, b}, db, {0.0, 1.0}});
          nodes.push_back({{domain.a1, b}, db, {0.0, 1.0}});
        }
      } else {
        const auto [xa, wa] = num::gauss_legendre(m, domain.a0, domain.a1);
        const auto [xb, wb] = num::gauss_legendre(m, domain.b0, domain.b1);
        for (int j = 0; j < m; ++j) {
          nodes.push_back({{xa[j], domain.b0}, wa[j], {1.0, 0.0}});
          nodes.push_back({{xa[j], domain.b1}, wa[j], {1.0, 0.0}});
          nodes.push_back({{domain.a0, xb[j]}, wb[j], {0.0, 1.0}});
          nodes.push_back({{domain.a1, xb[j]}, wb[j], {0.0, 1.0}});
        }
      }
      break;
    }
    case ParamDomain::Kind::interval: {
      if (!domain.closed_curve) {
        nodes.push_back({{domain.a0, 0.0}, 1.0, {1.0, 0.0}});
        nodes.push_back({{domain.a1, 0.0}, 1.0, {1.0, 0.0}});
      }
      break;
    }
  }
  return nodes;
}

PointGeometry extrinsic_geometry(const ImmersedPatch& patch,
                                 const Eigen::Vector2d& xi) {
  PointGeometry geo;
  const int n = patch.n;
  const int m = patch.codim();

  if (patch.is_warped_slice()) {
    // intrinsic chart metric of the 2-d sub-slice; totally geodesic
    models::WarpedModel sub;
    sub.dim = 2;
    sub.profile = patch.warped_ambient->profile;
    sub.curvature_class = patch.warped_ambient->curvature_class;
    sub.theta = sub.profile.asymptotic_slope;
    const auto metric = potential::warped_chart(sub);
    Eigen::Matrix2d g2 = metric.at(xi);
    geo.g = g2;
    geo.g_inv = g2.inverse();
    geo.sqrt_det_g = std::sqrt(g2.determinant());
    geo.min_g_eigenvalue =
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(g2).eigenvalues().minCoeff();
    geo.II.assign(m, Eigen::MatrixXd::Zero(n, n));
    geo.H = Eigen::VectorXd::Zero(m);
    geo.H_norm = 0.0;
    return geo;
  }

  const auto d1 = patch.dF(xi);
  geo.tangent.resize(patch.ambient_dim, n);
  for (int a = 0; a < n; ++a) geo.tangent.col(a) = d1[a];
  geo.g = geo.tangent.transpose() * geo.tangent;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(geo.g);
  geo.min_g_eigenvalue = es.eigenvalues().minCoeff();
  if (geo.min_g_eigenvalue <= 1e-10) {
    throw Error("extrinsic_geometry: degenerate immersion at (" +
                std::to_string(xi.x()) + ", " + std::to_string(xi.y()) + ")");
  }
  geo.g_inv = geo.g.inverse();
  geo.sqrt_det_g = std::sqrt(geo.g.determinant());

  // orthonormal tangents, then a fixed-order Gram-Schmidt normal frame
  Eigen::MatrixXd Ton = geo.tangent;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < a; ++b) Ton.col(a) -= Ton.col(b).dot(Ton.col(a)) * Ton.col(b);
    Ton.col(a).normalize();
  }
  geo.normal.resize(patch.ambient_dim, m);
  int found = 0;
  for (int i = 0; i < patch.ambient_dim && found < m; ++i) {
    Eigen::VectorXd v = Eigen::VectorXd::Unit(patch.ambient_dim, i);
    v -= Ton * (Ton.transpose() * v);
    for (int b = 0; b < found; ++b) {
      v -= geo.normal.col(b).dot(v) * geo.normal.col(b);
    }
    const double nv = v.norm();
    if (nv > 1e-7) {
      geo.normal.col(found++) = v / nv;
    }
  }
  if (found != m) {
    throw Error("extrinsic_geometry: could not build the normal frame");
  }

  geo.normal_residual = 0.0;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      const double want = i == j ? 1.0 : 0.0;
      geo.normal_residual =
          std::max(geo.normal_residual,
                   std::abs(geo.normal.col(i).dot(geo.normal.col(j)) - want));
    }
    for (int a = 0; a < n; ++a) {
      geo.normal_residual =
          std::max(geo.normal_residual,
                   std::abs(geo.normal.col(i).dot(geo.tangent.col(a))) /
                       std::sqrt(geo.g(a, a)));
    }
  }

  const auto d2 = patch.d2F(xi);
  const auto second = [&](int a, int b) -> const Eigen::VectorXd& {
    if (n == 1) return d2[0];
    return d2[a + b];  // (0,0)->xx, (0,1)/(1,0)->xy, (1,1)->yy
  };
  geo.II.assign(m, Eigen::MatrixXd::Zero(n, n));
  geo.H = Eigen::VectorXd::Zero(m);
  for (int beta = 0; beta < m; ++beta) {
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        geo.II[beta](a, b) = geo.normal.col(beta).dot(second(a, b));
      }
    }
    geo.H[beta] = (geo.g_inv * geo.II[beta]).trace();
  }
  geo.H_norm = geo.H.norm();
  return geo;
}

ExtrinsicSummary extrinsic_summary(const ImmersedPatch& patch) {
  ExtrinsicSummary s;
  s.min_g_eigenvalue = std::numeric_limits<double>::infinity();
  for (const auto& node : patch.interior_quadrature()) {
    const PointGeometry geo = extrinsic_geometry(patch, node.xi);
    s.area += node.w * geo.sqrt_det_g;
    s.max_H = std::max(s.max_H, geo.H_norm);
    s.min_g_eigenvalue = std::min(s.min_g_eigenvalue, geo.min_g_eigenvalue);
    s.max_normal_residual = std::max(s.max_normal_residual, geo.normal_residual);
  }
  for (const auto& node : patch.boundary_quadrature()) {
    if (patch.n == 1) {
      s.boundary_length += 1.0;  // counting measure on curve endpoints
    } else if (patch.is_warped_slice()) {
      const PointGeometry geo = extrinsic_geometry(patch, node.xi);
      const double len = std::sqrt(node.tangent.dot(geo.g * node.tangent));
      s.boundary_length += node.w * len;
    } else {
      const auto d1 = patch.dF(node.xi);
      const Eigen::VectorXd tau = d1[0] * node.tangent.x() + d1[1] * node.tangent.y();
      s.boundary_length += node.w * tau.norm();
    }
  }
  return s;
}

ImmersedPatch lift_codim1(const ImmersedPatch& patch) {
  if (patch.codim() != 1) {
    throw Error("lift_codim1 expects a codimension-1 patch");
  }
  ImmersedPatch out = patch;
  out.name = patch.name + "_lifted";
  out.ambient_dim = patch.ambient_dim + 1;
  const int N = patch.ambient_dim;
  const auto append0 = [N](const Eigen::VectorXd& v) {
    Eigen::VectorXd w(N + 1);
    w.head(N) = v;
    w[N] = 0.0;
    return w;
  };
  const auto F0 = patch.F;
  const auto dF0 = patch.dF;
  const auto d2F0 = patch.d2F;
  out.F = [F0, append0](const Eigen::Vector2d& xi) { return append0(F0(xi)); };
  out.dF = [dF0, append0](const Eigen::Vector2d& xi) {
    const auto d = dF0(xi);
    return std::array<Eigen::VectorXd, 2>{append0(d[0]), append0(d[1])};
  };
  out.d2F = [d2F0, append0](const Eigen::Vector2d& xi) {
    const auto d = d2F0(xi);
    return std::array<Eigen::VectorXd, 3>{append0(d[0]), append0(d[1]),
                                          append0(d[2])};
  };
  return out;
}

SurfaceDensity constant_surface_density() {
  SurfaceDensity f;
  f.base = [](const Eigen::Vector2d&) { return 1.0; };
  f.dbase = [](const Eigen::Vector2d&) { return Eigen::Vector2d::Zero().eval(); };
  f.is_constant = true;
  return f;
}

namespace {

struct SideIntegrals {
  double lhs_interior = 0.0;
  double lhs_boundary = 0.0;
  double power = 0.0;
};

SideIntegrals side_integrals(const ImmersedPatch& patch,
                             const SurfaceDensity& f, int level) {
  SideIntegrals s;
  const int n = patch.n;
  const double p = n > 1 ? double(n) / (n - 1) : 1.0;
  for (const auto& node : patch.interior_quadrature(level)) {
    const PointGeometry geo = extrinsic_geometry(patch, node.xi);
    const double fv = f.value(node.xi);
    double grad2 = 0.0;
    if (!f.is_constant) {
      Eigen::VectorXd df = f.grad_param(node.xi).head(n);
      grad2 = df.dot(geo.g_inv * df);
    }
    s.lhs_interior += node.w * geo.sqrt_det_g *
                      std::sqrt(grad2 + fv * fv * geo.H_norm * geo.H_norm);
    s.power += node.w * geo.sqrt_det_g * std::pow(fv, p);
  }
  for (const auto& node : patch.boundary_quadrature(2 * level)) {
    const double fv = f.value(node.xi);
    if (n == 1) {
      s.lhs_boundary += fv;
    } else if (patch.is_warped_slice()) {
      const PointGeometry geo = extrinsic_geometry(patch, node.xi);
      s.lhs_boundary +=
          node.w * fv * std::sqrt(node.tangent.dot(geo.g * node.tangent));
    } else {
      const auto d1 = patch.dF(node.xi);
      const Eigen::VectorXd tau =
          d1[0] * node.tangent.x() + d1[1] * node.tangent.y();
      s.lhs_boundary += node.w * fv * tau.norm();
    }
  }
  return s;
}

}  // namespace

MsSides ms_sides(const ImmersedPatch& patch, const SurfaceDensity& f,
                 double theta) {
  const int n = patch.n;
  const int m = patch.codim();
  if (m < 2) {
    throw Error("ms_sides requires codimension >= 2; lift the patch first");
  }
  if (n == 1 && (!f.is_constant || std::abs(f.value({0, 0}) - 1.0) > 1e-12)) {
    throw Error("ms_sides with n = 1 supports only f = 1");
  }

  // refine until two consecutive levels agree to 1e-8 relative
  int level = default_level(patch.domain);
  SideIntegrals s = side_integrals(patch, f, level);
  for (int pass = 0; pass < 3; ++pass) {
    const int finer = level + level / 2;
    const SideIntegrals s2 = side_integrals(patch, f, finer);
    const double v1 = s.lhs_interior + s.lhs_boundary;
    const double v2 = s2.lhs_interior + s2.lhs_boundary;
    const double rel = std::abs(v1 - v2) / (std::abs(v2) + 1e-300) +
                       std::abs(s.power - s2.power) / (std::abs(s2.power) + 1e-300);
    s = s2;
    level = finer;
    if (rel < 1e-8) break;
    if (pass == 2) {
      throw QuadratureError("ms_sides quadrature did not converge", rel);
    }
  }

  MsSides out;
  out.n = n;
  out.m = m;
  out.theta = theta;
  out.lhs = s.lhs_interior + s.lhs_boundary;
  out.power_integral = s.power;
  const double C = (double(n + m) * models::unit_ball_volume(n + m)) /
                   (double(m) * models::unit_ball_volume(m));
  if (n == 1) {
    out.rhs = C * theta;
  } else {
    out.rhs = n * std::pow(C, 1.0 / n) * std::pow(theta, 1.0 / n) *
              std::pow(s.power, double(n - 1) / n);
  }
  out.ratio = out.lhs / out.rhs;
  return out;
}

SurfaceDensity normalize_surface_density(const ImmersedPatch& patch,
                                         const SurfaceDensity& f,
                                         double* lambda_out) {
  const int n = patch.n;
  if (n == 1) {
    if (lambda_out) *lambda_out = 1.0;
    return f;  // presets are built normalized; no scaling freedom for n = 1
  }
  const SideIntegrals s = side_integrals(patch, f, default_level(patch.domain));
  const double A = s.lhs_interior + s.lhs_boundary;
  const double B = s.power;
  const double lambda = std::pow(A / (n * B), n - 1);
  SurfaceDensity out = f;
  out.scale *= lambda;
  if (lambda_out) *lambda_out = lambda;
  return out;
}

// ---- presets ---------------------------------------------------------------

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(v.size());
  int i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

ImmersedPatch scale_patch(ImmersedPatch p, double c) {
  const auto F0 = p.F;
  const auto dF0 = p.dF;
  const auto d2F0 = p.d2F;
  p.F = [F0, c](const Eigen::Vector2d& xi) { return (c * F0(xi)).eval(); };
  p.dF = [dF0, c](const Eigen::Vector2d& xi) {
    auto d = dF0(xi);
    d[0] *= c;
    d[1] *= c;
    return d;
  };
  p.d2F = [d2F0, c](const Eigen::Vector2d& xi) {
    auto d = d2F0(xi);
    d[0] *= c;
    d[1] *= c;
    d[2] *= c;
    return d;
  };
  return p;
}

// scale an open (closed) curve so that L = 2 + int|H| (L = int|H|), the
// f = 1 normalization identity for n = 1
ImmersedPatch normalize_curve(ImmersedPatch p) {
  double length = 0.0, total_H = 0.0;
  for (const auto& node : p.interior_quadrature()) {
    const PointGeometry geo = extrinsic_geometry(p, node.xi);
    length += node.w * geo.sqrt_det_g;
    total_H += node.w * geo.sqrt_det_g * geo.H_norm;
  }
  const double boundary = p.domain.closed_curve ? 0.0 : 2.0;
  const double c = (boundary + total_H) / length;
  return scale_patch(std::move(p), c);
}

}  // namespace

ImmersedPatch flat_disk_patch(int ambient_dim, double R) {
  if (ambient_dim < 3) throw Error("flat_disk_patch: ambient_dim >= 3");
  ImmersedPatch p;
  p.name = ambient_dim == 3 ? "flat_disk3" : "flat_disk";
  p.n = 2;
  p.ambient_dim = ambient_dim;
  p.domain.kind = ParamDomain::Kind::disk;
  p.domain.R = R;
  p.declared_minimal = true;
  const int N = ambient_dim;
  p.F = [N](const Eigen::Vector2d& xi) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(N);
    v[0] = xi.x();
    v[1] = xi.y();
    return v;
  };
  p.dF = [N](const Eigen::Vector2d&) {
    return std::array<Eigen::VectorXd, 2>{Eigen::VectorXd::Unit(N, 0),
                                          Eigen::VectorXd::Unit(N, 1)};
  };
  p.d2F = [N](const Eigen::Vector2d&) {
    return std::array<Eigen::VectorXd, 3>{Eigen::VectorXd::Zero(N),
                                          Eigen::VectorXd::Zero(N),
                                          Eigen::VectorXd::Zero(N)};
  };
  return p;
}

ImmersedPatch flat_strip_patch(double a, double b) {
  ImmersedPatch p;
  p.name = "flat_strip";
  p.n = 2;
  p.ambient_dim = 4;
  p.domain.kind = ParamDomain::Kind::rectangle;
  p.domain.a0 = 0.0;
  p.domain.a1 = a;
  p.domain.b0 = 0.0;
  p.domain.b1 = b;
  p.declared_minimal = true;
  p.F = [](const Eigen::Vector2d& xi) {
    return vec({xi.x(), xi.y(), 0.0, 0.0});
  };
  p.dF = [](const Eigen::Vector2d&) {
    return std::array<Eigen::VectorXd, 2>{Eigen::VectorXd::Unit(4, 0),
                                          Eigen::VectorXd::Unit(4, 1)};
  };
  p.d2F = [](const Eigen::Vector2d&) {
    return std::array<Eigen::VectorXd, 3>{Eigen::VectorXd::Zero(4),
                                          Eigen::VectorXd::Zero(4),
                                          Eigen::VectorXd::Zero(4)};
  };
  return p;
}

namespace {

ImmersedPatch planar_curve_patch(const std::string& name, double t0, double t1,
                                 bool closed,
                                 std::function<Eigen::Vector2d(double)> c,
                                 std::function<Eigen::Vector2d(double)> dc,
                                 std::function<Eigen::Vector2d(double)> ddc) {
  ImmersedPatch p;
  p.name = name;
  p.n = 1;
  p.ambient_dim = 3;
  p.domain.kind = ParamDomain::Kind::interval;
  p.domain.a0 = t0;
  p.domain.a1 = t1;
  p.domain.closed_curve = closed;
  p.F = [c](const Eigen::Vector2d& xi) {
    const Eigen::Vector2d v = c(xi.x());
    return vec({v.x(), v.y(), 0.0});
  };
  p.dF = [dc](const Eigen::Vector2d& xi) {
    const Eigen::Vector2d v = dc(xi.x());
    return std::array<Eigen::VectorXd, 2>{vec({v.x(), v.y(), 0.0}),
                                          Eigen::VectorXd::Zero(3)};
  };
  p.d2F = [ddc](const Eigen::Vector2d& xi) {
    const Eigen::Vector2d v = ddc(xi.x());
    return std::array<Eigen::VectorXd, 3>{vec({v.x(), v.y(), 0.0}),
                                          Eigen::VectorXd::Zero(3),
                                          Eigen::VectorXd::Zero(3)};
  };
  return normalize_curve(std::move(p));
}

}  // namespace

ImmersedPatch circle_patch() {
  return planar_curve_patch(
      "circle", 0.0, 2.0 * M_PI, true,
      [](double t) { return Eigen::Vector2d(std::cos(t), std::sin(t)); },
      [](double t) { return Eigen::Vector2d(-std::sin(t), std::cos(t)); },
      [](double t) { return Eigen::Vector2d(-std::cos(t), -std::sin(t)); });
}

ImmersedPatch arc_patch() {
  return planar_curve_patch(
      "arc", 0.0, M_PI, false,
      [](double t) { return Eigen::Vector2d(std::cos(t), std::sin(t)); },
      [](double t) { return Eigen::Vector2d(-std::sin(t), std::cos(t)); },
      [](double t) { return Eigen::Vector2d(-std::cos(t), -std::sin(t)); });
}

ImmersedPatch spiral_patch() {
  const double b = 0.15;
  const auto c = [b](double t) {
    const double r = 1.0 + b * t;
    return Eigen::Vector2d(r * std::cos(t), r * std::sin(t));
  };
  const auto dc = [b](double t) {
    const double r = 1.0 + b * t;
    return Eigen::Vector2d(b * std::cos(t) - r * std::sin(t),
                           b * std::sin(t) + r * std::cos(t));
  };
  const auto ddc = [b](double t) {
    const double r = 1.0 + b * t;
    return Eigen::Vector2d(-2.0 * b * std::sin(t) - r * std::cos(t),
                           2.0 * b * std::cos(t) - r * std::sin(t));
  };
  return planar_curve_patch("spiral", 0.0, 2.5 * M_PI, false, c, dc, ddc);
}

ImmersedPatch complex_curve_patch(int k) {
  if (k < 2) throw Error("complex_curve_patch requires k >= 2");
  ImmersedPatch p;
  p.name = "complex_curve";
  p.n = 2;
  p.ambient_dim = 4;
  p.domain.kind = ParamDomain::Kind::disk;
  p.domain.R = 1.0;
  p.declared_minimal = true;
  using C = std::complex<double>;
  p.F = [k](const Eigen::Vector2d& xi) {
    const C z(xi.x(), xi.y());
    const C zk = std::pow(z, k);
    return vec({xi.x(), xi.y(), zk.real(), zk.imag()});
  };
  p.dF = [k](const Eigen::Vector2d& xi) {
    const C z(xi.x(), xi.y());
    const C w = double(k) * std::pow(z, k - 1);
    return std::array<Eigen::VectorXd, 2>{
        vec({1.0, 0.0, w.real(), w.imag()}),
        vec({0.0, 1.0, -w.imag(), w.real()})};
  };
  p.d2F = [k](const Eigen::Vector2d& xi) {
    const C z(xi.x(), xi.y());
    const C v = double(k) * double(k - 1) *
                (k >= 2 ? std::pow(z, k - 2) : C(0.0, 0.0));
    return std::array<Eigen::VectorXd, 3>{
        vec({0.0, 0.0, v.real(), v.imag()}),
        vec({0.0, 0.0, -v.imag(), v.real()}),
        vec({0.0, 0.0, -v.real(), -v.imag()})};
  };
  return p;
}

ImmersedPatch hemisphere_patch() {
  ImmersedPatch p;
  p.name = "hemisphere";
  p.n = 2;
  p.ambient_dim = 3;
  p.domain.kind = ParamDomain::Kind::rectangle;
  p.domain.a0 = 0.0;
  p.domain.a1 = 0.5 * M_PI;  // polar angle
  p.domain.b0 = 0.0;
  p.domain.b1 = 2.0 * M_PI;
  p.domain.periodic_b = true;
  p.F = [](const Eigen::Vector2d& xi) {
    const double th = xi.x(), ph = xi.y();
    return vec({std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph),
                std::cos(th)});
  };
  p.dF = [](const Eigen::Vector2d& xi) {
    const double th = xi.x(), ph = xi.y();
    return std::array<Eigen::VectorXd, 2>{
        vec({std::cos(th) * std::cos(ph), std::cos(th) * std::sin(ph),
             -std::sin(th)}),
        vec({-std::sin(th) * std::sin(ph), std::sin(th) * std::cos(ph), 0.0})};
  };
  p.d2F = [](const Eigen::Vector2d& xi) {
    const double th = xi.x(), ph = xi.y();
    return std::array<Eigen::VectorXd, 3>{
        vec({-std::sin(th) * std::cos(ph), -std::sin(th) * std::sin(ph),
             -std::cos(th)}),
        vec({-std::cos(th) * std::sin(ph), std::cos(th) * std::cos(ph), 0.0}),
        vec({-std::sin(th) * std::cos(ph), -std::sin(th) * std::sin(ph), 0.0})};
  };
  return p;
}

ImmersedPatch catenoid_band_patch(double v0) {
  ImmersedPatch p;
  p.name = "catenoid_band";
  p.n = 2;
  p.ambient_dim = 3;
  p.domain.kind = ParamDomain::Kind::rectangle;
  p.domain.a0 = -v0;
  p.domain.a1 = v0;
  p.domain.b0 = 0.0;
  p.domain.b1 = 2.0 * M_PI;
  p.domain.periodic_b = true;
  p.declared_minimal = true;
  p.F = [](const Eigen::Vector2d& xi) {
    const double v = xi.x(), th = xi.y();
    return vec({std::cosh(v) * std::cos(th), std::cosh(v) * std::sin(th), v});
  };
  p.dF = [](const Eigen::Vector2d& xi) {
    const double v = xi.x(), th = xi.y();
    return std::array<Eigen::VectorXd, 2>{
        vec({std::sinh(v) * std::cos(th), std::sinh(v) * std::sin(th), 1.0}),
        vec({-std::cosh(v) * std::sin(th), std::cosh(v) * std::cos(th), 0.0})};
  };
  p.d2F = [](const Eigen::Vector2d& xi) {
    const double v = xi.x(), th = xi.y();
    return std::array<Eigen::VectorXd, 3>{
        vec({std::cosh(v) * std::cos(th), std::cosh(v) * std::sin(th), 0.0}),
        vec({-std::sinh(v) * std::sin(th), std::sinh(v) * std::cos(th), 0.0}),
        vec({-std::cosh(v) * std::cos(th), -std::cosh(v) * std::sin(th), 0.0})};
  };
  return p;
}

ImmersedPatch warped_slice_patch(std::shared_ptr<models::WarpedModel> model,
                                 double R) {
  if (!model || model->dim < 4) {
    throw Error("warped_slice_patch needs an ambient model of dim >= 4");
  }
  ImmersedPatch p;
  p.name = "warped_slice_disk";
  p.n = 2;
  p.ambient_dim = model->dim;
  p.domain.kind = ParamDomain::Kind::disk;
  p.domain.R = R;
  p.declared_minimal = true;
  p.warped_ambient = std::move(model);
  return p;
}

ImmersedPatch patch_by_name(const std::string& name, int k,
                            std::shared_ptr<models::WarpedModel> model,
                            double R) {
  if (name == "flat_disk") return flat_disk_patch(4, R);
  if (name == "flat_disk3") return flat_disk_patch(3, R);
  if (name == "flat_strip") return flat_strip_patch();
  if (name == "circle") return circle_patch();
  if (name == "arc") return arc_patch();
  if (name == "spiral") return spiral_patch();
  if (name == "complex_curve") return complex_curve_patch(k);
  if (name == "hemisphere") return hemisphere_patch();
  if (name == "catenoid_band") return catenoid_band_patch();
  if (name == "warped_slice_disk") return warped_slice_patch(std::move(model), R);
  throw ConfigError("unknown patch preset: " + name);
}

}  // namespace geosob::submanifold
