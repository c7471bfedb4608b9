#include "geosob/potential/solver.hpp"

#include <cmath>

#include "geosob/errors.hpp"
#include "geosob/num/quadrature.hpp"

namespace geosob::potential {

namespace {

double boundary_area_coeff(const models::WarpedModel& model, double r) {
  // area of the distance sphere of radius r divided by f: k omega_k phi^{k-1}
  const int k = model.dim;
  return k * models::unit_ball_volume(k) * std::pow(model.profile.phi(r), k - 1);
}

void radial_integrals(const RadialDensity& f, const GeoDomain& D,
                      const models::WarpedModel& model, double* A, double* B) {
  if (D.kind == GeoDomain::Kind::meshed_region) {
    throw Error("radial_integrals: meshed regions use the FEM path");
  }
  const int n = model.dim;
  const double coeff = n * models::unit_ball_volume(n);
  const auto phi_pow = [&](double s) {
    return std::pow(model.profile.phi(s), n - 1);
  };
  const double grad_part = coeff * num::integrate_value(
      [&](double s) { return f.grad_mag(s) * phi_pow(s); }, D.R0, D.R1);
  double bdry = f.value(D.R1) * boundary_area_coeff(model, D.R1);
  if (D.kind == GeoDomain::Kind::geodesic_annulus) {
    bdry += f.value(D.R0) * boundary_area_coeff(model, D.R0);
  }
  *A = grad_part + bdry;
  *B = coeff * num::integrate_value(
      [&](double s) { return f.power(s, n) * phi_pow(s); }, D.R0, D.R1);
}

}  // namespace

RadialDensity normalize_density(const RadialDensity& f, const GeoDomain& D,
                                const models::WarpedModel& model,
                                NormalizationReport* report) {
  const int n = model.dim;
  // positivity check on a probe grid
  for (int i = 0; i <= 256; ++i) {
    const double r = D.R0 + (D.R1 - D.R0) * i / 256.0;
    if (!(f.value(r) > 0.0)) {
      throw Error("density must be strictly positive on the domain");
    }
  }
  double A = 0.0, B = 0.0;
  radial_integrals(f, D, model, &A, &B);
  const double lambda = normalization_factor(A, B, n);

  RadialDensity out = f;
  out.scale *= lambda;

  if (report) {
    double A2 = 0.0, B2 = 0.0;
    radial_integrals(out, D, model, &A2, &B2);
    report->lambda = lambda;
    report->lhs_integral = A2;
    report->power_integral = B2;
    report->residual = std::abs(A2 - n * B2) / A2;
  }
  return out;
}

RadialPotential::RadialPotential(const models::WarpedModel& model,
                                 RadialDensity density, double R0, double R1)
    : model_(model), density_(std::move(density)), n_(model.dim), R0_(R0),
      R1_(R1) {
  const int N = 2048;
  const double h = (R1_ - R0_) / N;
  const auto phi = [&](double s) { return model.profile.phi(s); };
  const auto g = [&](double s) {
    return (n_ * density_.power(s, n_) - density_.grad_mag(s)) *
           std::pow(phi(s), n_ - 1);
  };

  // prefix integral of the flux source, Hermite-interpolated with its exact
  // derivative g; the grid carries the critical radii of f so |f'| kinks
  // fall on nodes and the interpolation stays O(h^4)
  std::vector<double> rs;
  rs.reserve(N + 8);
  for (int i = 0; i <= N; ++i) rs.push_back(R0_ + h * i);
  {
    double prev = density_.deriv(R0_ + 1e-12);
    for (int i = 1; i <= 512; ++i) {
      const double r = R0_ + (R1_ - R0_) * i / 512.0;
      const double cur = density_.deriv(r);
      if ((prev < 0.0) != (cur < 0.0) && prev != 0.0) {
        double lo = R0_ + (R1_ - R0_) * (i - 1) / 512.0, hi = r;
        for (int it = 0; it < 60; ++it) {
          const double mid = 0.5 * (lo + hi);
          ((density_.deriv(mid) < 0.0) == (prev < 0.0) ? lo : hi) = mid;
        }
        rs.push_back(0.5 * (lo + hi));
      }
      prev = cur;
    }
    std::sort(rs.begin(), rs.end());
    rs.erase(std::unique(rs.begin(), rs.end(),
                         [&](double a, double b) { return b - a < 1e-12; }),
             rs.end());
  }
  const std::size_t M = rs.size() - 1;
  std::vector<double> I(M + 1), gI(M + 1);
  for (std::size_t i = 0; i <= M; ++i) gI[i] = g(rs[i]);
  I[0] = 0.0;
  for (std::size_t i = 1; i <= M; ++i) {
    I[i] = I[i - 1] + num::integrate_value(g, rs[i - 1], rs[i], 1e-14, 1e-12);
  }
  prefix_ = num::HermiteSpline(rs, I, gI);

  const bool ball = R0_ == 0.0;
  const double C0 =
      ball ? 0.0 : -density_.value(R0_) * std::pow(phi(R0_), n_ - 1);

  const auto du_raw = [&](double r) -> double {
    if (ball && r < 1e-7 * R1_) {
      return density_.speed_scale(0.0, n_) * r;
    }
    return (C0 + prefix_.eval(r)) /
           (density_.value(r) * std::pow(phi(r), n_ - 1));
  };

  // u by quadrature of u'
  std::vector<double> uvals(M + 1), duvals(M + 1);
  for (std::size_t i = 0; i <= M; ++i) duvals[i] = du_raw(rs[i]);
  uvals[0] = 0.0;
  for (std::size_t i = 1; i <= M; ++i) {
    uvals[i] = uvals[i - 1] +
               num::integrate_value(du_raw, rs[i - 1], rs[i], 1e-14, 1e-12);
  }
  u_ = num::HermiteSpline(rs, uvals, duvals);
  du_ = num::HermiteSpline(rs, duvals, [&] {
    std::vector<double> d2(M + 1);
    for (std::size_t i = 0; i <= M; ++i) {
      const double r = rs[i];
      if (ball && r < 1e-7 * R1_) {
        d2[i] = density_.speed_scale(0.0, n_);
        continue;
      }
      const double fv = density_.value(r);
      const double dfv = density_.deriv(r);
      d2[i] = (n_ * density_.power(r, n_) - density_.grad_mag(r)) / fv -
              duvals[i] * (dfv / fv +
                           (n_ - 1) * model.profile.dphi(r) / phi(r));
    }
    return d2;
  }());

  residual_neumann_ = std::abs(du(R1_) - 1.0);
  if (!ball) residual_neumann_ = std::max(residual_neumann_, std::abs(du(R0_) + 1.0));

  // interior residual of div(f grad u) - rhs on an offset grid
  double res = 0.0, scale = 0.0;
  for (int i = 0; i < 512; ++i) {
    const double r = R0_ + (R1_ - R0_) * (i + 0.5) / 512.0;
    const double rhs = n_ * density_.power(r, n_) - density_.grad_mag(r);
    const double lhs =
        density_.value(r) * laplacian(r) + density_.deriv(r) * du(r);
    res = std::max(res, std::abs(lhs - rhs));
    scale = std::max(scale, std::abs(rhs));
  }
  residual_interior_ = res / (scale + 1e-300);
}

double RadialPotential::du(double r) const {
  r = clampr(r);
  if (R0_ == 0.0 && r < 1e-7 * R1_) {
    return density_.speed_scale(0.0, n_) * r;
  }
  return du_.eval(r);
}

double RadialPotential::d2u(double r) const {
  r = clampr(r);
  if (R0_ == 0.0 && r < 1e-7 * R1_) return density_.speed_scale(0.0, n_);
  const double fv = density_.value(r);
  return (n_ * density_.power(r, n_) - density_.grad_mag(r)) / fv -
         du(r) * (density_.deriv(r) / fv +
                  (n_ - 1) * model_.profile.dphi(r) / model_.profile.phi(r));
}

double RadialPotential::hessian_tangential(double r) const {
  r = clampr(r);
  if (R0_ == 0.0 && r < 1e-7 * R1_) return density_.speed_scale(0.0, n_);
  return du(r) * model_.profile.dphi(r) / model_.profile.phi(r);
}

double RadialPotential::laplacian(double r) const {
  r = clampr(r);
  if (R0_ == 0.0 && r < 1e-7 * R1_) {
    return n_ * density_.speed_scale(0.0, n_);
  }
  return d2u(r) + (n_ - 1) * hessian_tangential(r);
}

RadialPotential solve_radial(const RadialDensity& f, const GeoDomain& D,
                             const models::WarpedModel& model) {
  if (D.kind == GeoDomain::Kind::meshed_region) {
    throw Error("solve_radial: domain must be a ball or annulus");
  }
  RadialPotential sol(model, f, D.R0, D.R1);
  if (sol.residual_neumann() > 1e-9) {
    throw Error("solve_radial: boundary value u' != 1; density not normalized "
                "(residual " + std::to_string(sol.residual_neumann()) + ")");
  }
  return sol;
}

LaplacianMargin laplacian_bound_check(const RadialPotential& sol,
                                      int probe_count) {
  LaplacianMargin m;
  m.min_margin = std::numeric_limits<double>::infinity();
  const double R0 = sol.R0_bound(), R1 = sol.R1_bound();
  for (int i = 0; i < probe_count; ++i) {
    const double r = R0 + (R1 - R0) * (i + 0.5) / probe_count;
    if (std::abs(sol.du(r)) >= 1.0) continue;
    ++m.points_in_U;
    const double margin =
        sol.dim() * sol.density().speed_scale(r, sol.dim()) - sol.laplacian(r);
    if (margin < m.min_margin) {
      m.min_margin = margin;
      m.argmin_r = r;
    }
  }
  return m;
}

}  // namespace geosob::potential
