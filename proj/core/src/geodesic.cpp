#include "geosob/geodesy/geodesic.hpp"

#include <algorithm>
#include <cmath>

#include "geosob/errors.hpp"
#include "geosob/num/ode.hpp"

namespace geosob::geodesy {

PolarPoint make_polar(double r, Eigen::VectorXd omega) {
  if (r < 0.0) throw Error("PolarPoint requires r >= 0");
  const double n = omega.norm();
  if (std::abs(n - 1.0) > 1e-12) {
    throw Error("PolarPoint direction must be a unit vector");
  }
  return PolarPoint{r, std::move(omega)};
}

double TangentVector::norm() const { return std::hypot(radial, spherical); }

PolarPoint GeodesicCurve::point_at(const GeodesicSample& s) const {
  const double r = std::abs(s.rho);
  Eigen::VectorXd dir;
  if (radial) {
    dir = (s.rho >= 0.0 ? 1.0 : -1.0) * omega0;
  } else {
    dir = std::cos(s.psi) * omega0 + std::sin(s.psi) * what;
  }
  PolarPoint p;
  p.r = r;
  p.omega = std::move(dir);
  return p;
}

double sphere_angle(const PolarPoint& x, const PolarPoint& p) {
  const double c = std::clamp(x.omega.dot(p.omega), -1.0, 1.0);
  return std::acos(c);
}

namespace {

// Reduced slice geodesic state: y = (rho, v_rho, psi) with conserved
// angular momentum L = phi^2 psi'.
num::OdeRhs slice_rhs(const models::WarpedModel& model, double L) {
  return [&model, L](double, const Eigen::VectorXd& y, Eigen::VectorXd& dy) {
    const double rho = y[0];
    const double phi = model.profile.phi(rho);
    const double dphi = model.profile.dphi(rho);
    dy.resize(3);
    dy[0] = y[1];
    dy[1] = L == 0.0 ? 0.0 : dphi * L * L / (phi * phi * phi);
    dy[2] = L == 0.0 ? 0.0 : L / (phi * phi);
  };
}

GeodesicCurve radial_exp(const models::WarpedModel& model, const PolarPoint& x,
                         const TangentVector& v, double t,
                         const ExpOptions& opts) {
  GeodesicCurve c;
  c.radial = true;
  c.omega0 = x.omega;
  c.what = Eigen::VectorXd::Zero(x.omega.size());
  c.speed = v.norm();
  c.angular_momentum = 0.0;
  c.t_max = t;
  const double vr = v.radial;
  const int n = opts.samples;
  c.samples.resize(n + 1);
  for (int i = 0; i <= n; ++i) {
    const double ti = t * double(i) / double(n);
    GeodesicSample s;
    s.t = ti;
    s.rho = x.r + vr * ti;
    s.psi = 0.0;
    s.drho = vr;
    s.dpsi = 0.0;
    s.a = c.speed > 0.0 ? vr / c.speed : 1.0;
    s.b = 0.0;
    c.samples[i] = s;
  }
  c.energy_drift = 0.0;
  c.frame_residual = std::abs(c.samples[0].a * c.samples[0].a - 1.0);
  (void)model;
  return c;
}

}  // namespace

GeodesicCurve exp_map(const models::WarpedModel& model, const PolarPoint& x,
                      const TangentVector& v, double t,
                      const ExpOptions& opts) {
  if (t < 0.0) throw Error("exp_map requires t >= 0");
  const double speed = v.norm();
  if (speed == 0.0) throw Error("exp_map requires a nonzero velocity");

  if (v.spherical < 1e-14 * speed || x.r < 1e-14) {
    return radial_exp(model, x, v, t, opts);
  }
  if (std::abs(v.dir.dot(x.omega)) > 1e-10 ||
      std::abs(v.dir.norm() - 1.0) > 1e-10) {
    throw Error("exp_map: spherical direction must be unit and orthogonal to omega");
  }

  GeodesicCurve c;
  c.radial = false;
  c.omega0 = x.omega;
  c.what = v.dir;
  c.speed = speed;
  c.angular_momentum = model.profile.phi(x.r) * v.spherical;
  c.t_max = t;

  Eigen::VectorXd y0(3);
  y0 << x.r, v.radial, 0.0;

  num::OdeOptions oo;
  oo.abs_tol = oo.rel_tol = opts.tol;
  const num::Dopri5 ode(oo);
  const auto rhs = slice_rhs(model, c.angular_momentum);
  const num::OdeSolution sol = ode.integrate(rhs, 0.0, t, y0);

  const int n = opts.samples;
  c.samples.resize(n + 1);
  const double L = c.angular_momentum;
  for (int i = 0; i <= n; ++i) {
    const double ti = t * double(i) / double(n);
    const Eigen::VectorXd yi = i == 0 ? y0 : (i == n ? sol.y_end() : sol.eval(ti));
    GeodesicSample s;
    s.t = ti;
    s.rho = yi[0];
    s.drho = yi[1];
    s.psi = yi[2];
    const double phi = model.profile.phi(s.rho);
    s.dpsi = L / (phi * phi);
    s.a = s.drho / c.speed;
    s.b = L / (phi * c.speed);
    c.samples[i] = s;
    c.energy_drift = std::max(
        c.energy_drift, std::abs(std::hypot(s.drho, L / phi) - c.speed));
    c.frame_residual =
        std::max(c.frame_residual, std::abs(s.a * s.a + s.b * s.b - 1.0));
  }
  return c;
}

namespace {

struct ShotOutcome {
  bool reached = false;   // the slice angle hit dpsi
  double r_end = 0.0;     // radius at the event (or at the cap)
  double length = 0.0;    // arc length at the event
};

// Unit-speed shot from (r0, 0) with initial angle beta from the outward
// radial direction; stops when psi reaches dpsi or length exceeds t_cap.
ShotOutcome shoot(const models::WarpedModel& model, double r0, double beta,
                  double dpsi, double t_cap, double tol, int* evals) {
  const double L = model.profile.phi(r0) * std::sin(beta);
  Eigen::VectorXd y0(3);
  y0 << r0, std::cos(beta), 0.0;

  num::OdeOptions oo;
  oo.abs_tol = oo.rel_tol = tol;
  oo.dense_history = false;
  const num::Dopri5 ode(oo);
  const auto rhs = slice_rhs(model, L);
  const auto event = [dpsi](double, const Eigen::VectorXd& y) {
    return y[2] - dpsi;
  };
  double t_event = 0.0;
  Eigen::VectorXd y_event;
  const bool fired =
      ode.integrate_event(rhs, 0.0, t_cap, y0, event, &t_event, &y_event);
  if (evals) ++*evals;
  ShotOutcome out;
  out.reached = fired;
  out.r_end = y_event[0];
  out.length = t_event;
  return out;
}

}  // namespace

double slice_distance(const models::WarpedModel& model, double r0, double r1,
                      double dpsi, const DistanceOptions& opts,
                      SliceShot* shot) {
  if (r0 < 0.0 || r1 < 0.0 || dpsi < -1e-12 || dpsi > M_PI + 1e-12) {
    throw Error("slice_distance: invalid arguments");
  }
  dpsi = std::clamp(dpsi, 0.0, M_PI);
  if (shot) *shot = SliceShot{};

  // Pole and common-ray cases have exact radial answers.
  if (r0 < 1e-14 || r1 < 1e-14) {
    const double d = std::max(r0, r1);
    if (shot) shot->length = d;
    return d;
  }
  if (dpsi < 1e-5) {
    // small-angle regime: the chart chord is accurate to O(dpsi^2) relative
    // and the near-radial shots become stiff near the pole
    const auto chord = [&](double s) {
      const double r = r0 + s * (r1 - r0);
      const double w = model.profile.phi(std::abs(r)) * dpsi;
      return std::sqrt((r1 - r0) * (r1 - r0) + w * w);
    };
    double d = 0.0;
    static const double gx[5] = {0.046910077030668, 0.230765344947158, 0.5,
                                 0.769234655052841, 0.953089922969332};
    static const double gw[5] = {0.118463442528095, 0.239314335249683,
                                 0.284444444444444, 0.239314335249683,
                                 0.118463442528095};
    for (int i = 0; i < 5; ++i) d += gw[i] * chord(gx[i]);
    if (shot) shot->length = d;
    return d;
  }

  // Shoot from the larger radius towards the smaller.
  const bool swapped = r1 > r0;
  const double ra = swapped ? r1 : r0;
  const double rb = swapped ? r0 : r1;

  const double t_cap = r0 + r1 + 1.0;
  int evals = 0;

  const auto miss = [&](double beta) {
    const ShotOutcome o = shoot(model, ra, beta, dpsi, t_cap, opts.tol, &evals);
    if (!o.reached) return 10.0 * t_cap;  // angle never reached: far outside
    return o.r_end - rb;
  };

  // Bracket scan over the initial angle.
  const int n_scan = std::max(opts.scan, 8);
  std::vector<double> betas(n_scan), misses(n_scan);
  // near-backward shots pass arbitrarily close to the pole and turn stiff;
  // the through-pole candidate below covers that limit
  const double beta_lo = 1e-6, beta_hi = M_PI - 2e-4;
  for (int i = 0; i < n_scan; ++i) {
    betas[i] = beta_lo + (beta_hi - beta_lo) * double(i) / double(n_scan - 1);
    misses[i] = miss(betas[i]);
  }

  double best = std::numeric_limits<double>::infinity();
  double best_beta = 0.0;
  int roots = 0;
  for (int i = 0; i + 1 < n_scan; ++i) {
    if ((misses[i] <= 0.0) == (misses[i + 1] <= 0.0)) continue;
    // safeguarded secant with a bisection fallback
    double a = betas[i], b = betas[i + 1];
    double fa = misses[i], fb = misses[i + 1];
    for (int it = 0; it < opts.bisect_iters; ++it) {
      if (b - a < 1e-13 * (1.0 + std::abs(b))) break;
      double mcand = b - fb * (b - a) / (fb - fa);
      const double margin = 0.05 * (b - a);
      if (!(mcand > a + margin && mcand < b - margin) || it % 3 == 2) {
        mcand = 0.5 * (a + b);
      }
      const double fm = miss(mcand);
      if ((fa <= 0.0) == (fm <= 0.0)) {
        a = mcand;
        fa = fm;
      } else {
        b = mcand;
        fb = fm;
      }
    }
    const double beta_root = 0.5 * (a + b);
    const ShotOutcome o =
        shoot(model, ra, beta_root, dpsi, t_cap, opts.tol, &evals);
    if (!o.reached) continue;
    ++roots;
    if (o.length < best) {
      best = o.length;
      best_beta = beta_root;
    }
  }

  // The concatenated radial path through the pole is always admissible and
  // minimizing exactly in the antipodal limit.
  if (r0 + r1 < best) {
    best = r0 + r1;
    best_beta = 0.0;
    ++roots;
  }

  if (!std::isfinite(best)) {
    throw ShootingError(
        "slice_distance: no connecting geodesic found (scan of " +
        std::to_string(n_scan) + " angles, " + std::to_string(evals) +
        " integrations)");
  }
  if (shot) {
    shot->beta = best_beta;
    shot->length = best;
    shot->integrations = evals;
    shot->roots = roots;
  }
  return best;
}

double distance(const models::WarpedModel& model, const PolarPoint& x,
                const PolarPoint& p, const DistanceOptions& opts,
                SliceShot* shot) {
  const double dpsi = sphere_angle(x, p);
  return slice_distance(model, x.r, p.r, dpsi, opts, shot);
}

}  // namespace geosob::geodesy
