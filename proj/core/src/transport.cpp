#include "geosob/transport/transport.hpp"

#include <algorithm>
#include <cmath>

#include "geosob/errors.hpp"
#include "geosob/num/quadrature.hpp"
#include "geosob/num/rng.hpp"

namespace geosob::transport {

using geodesy::JacobiInit;
using geodesy::JacobiOptions;
using geodesy::JacobiSystem;
using geodesy::PolarPoint;
using geodesy::TangentVector;
using models::WarpedModel;
using potential::GeoDomain;
using potential::RadialPotential;

PhiResult phi_map(const WarpedModel& model, const RadialPotential& sol,
                  double s, double r, double ode_tol) {
  const int n = model.dim;
  PhiResult out;
  const double dus = sol.du(s);
  out.grad_norm = std::abs(dus);
  out.speed_scale = sol.density().speed_scale(s, n);
  out.bound = std::pow(1.0 + r * out.speed_scale, n);
  out.image_radius = s + r * dus;

  // Hessian of u in the geodesic-adapted frame: spherical directions first,
  // the (radial) tangent direction last.
  Eigen::MatrixXd P0p = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n - 1; ++i) P0p(i, i) = sol.hessian_tangential(s);
  P0p(n - 1, n - 1) = sol.d2u(s);

  JacobiInit init{Eigen::MatrixXd::Identity(n, n), P0p};
  JacobiOptions jopts;
  jopts.tol = ode_tol;

  JacobiSystem sys;
  if (out.grad_norm < 1e-14) {
    // stationary point: the geodesic degenerates, curvature term vanishes
    const auto S0 = [n](double) { return Eigen::MatrixXd::Zero(n, n); };
    sys = geodesy::propagate_jacobi(init, S0, r, 0, jopts);
  } else {
    PolarPoint x;
    x.r = s;
    x.omega = Eigen::VectorXd::Unit(n, 0);
    TangentVector v;
    v.radial = dus;
    v.spherical = 0.0;
    v.dir = Eigen::VectorXd::Zero(n);
    sys = geodesy::propagate_jacobi_along(model, x, v, r, init,
                                          Eigen::MatrixXd::Identity(n, n), 0,
                                          jopts);
  }

  if (sys.conjugate_point) {
    out.conjugate = true;
    out.first_conjugate_time = sys.first_conjugate_time;
    throw ConjugatePointError("phi_map: conjugate point before r",
                              sys.first_conjugate_time);
  }
  out.jacobian = sys.det_scaled.back();
  out.monotone_increase =
      geodesy::jacobian_ratio_monotone(sys, out.speed_scale)
          .max_forward_increase;
  out.trace_margin = geodesy::riccati_trace_bound(sys, out.speed_scale).min_margin;
  return out;
}

namespace {

double functional_value(const WarpedModel& model, const RadialPotential& sol,
                        double r, double s, double psi, double rho_image,
                        const geodesy::DistanceOptions& dist) {
  const double d = geodesy::slice_distance(model, s, rho_image, psi, dist);
  return r * sol.u(s) + 0.5 * d * d;
}

}  // namespace

ContactVerdict contact_test(const WarpedModel& model,
                            const RadialPotential& sol, double s_bar, double r,
                            const ContactProbeOptions& opts) {
  ContactVerdict v;
  const double dub = sol.du(s_bar);
  v.in_U = std::abs(dub) < 1.0;
  if (!v.in_U) return v;

  const double rho_image = s_bar + r * dub;
  const double R0 = sol.R0_bound(), R1 = sol.R1_bound();
  const double f_bar = r * sol.u(s_bar) + 0.5 * r * r * dub * dub;
  v.scale = std::max(1.0, std::abs(f_bar));
  v.margin = std::numeric_limits<double>::infinity();
  v.boundary_margin = std::numeric_limits<double>::infinity();

  num::Philox rng(opts.seed, 101);
  const int total = opts.radial * opts.angular + opts.random;
  int failures = 0;
  for (int idx = 0; idx < total; ++idx) {
    double s, psi;
    bool boundary = false;
    if (idx < opts.radial * opts.angular) {
      const int i = idx / opts.angular;
      const int j = idx % opts.angular;
      s = R0 + (R1 - R0) * double(i) / double(opts.radial - 1);
      psi = M_PI * double(j) / double(opts.angular - 1);
      boundary = (i == opts.radial - 1) || (R0 > 0.0 && i == 0);
    } else {
      s = R0 + (R1 - R0) * rng.uniform();
      psi = M_PI * rng.uniform();
    }
    ++v.probes;
    double val;
    try {
      val = functional_value(model, sol, r, s, psi, rho_image, opts.dist);
    } catch (const ShootingError&) {
      ++failures;
      ++v.skipped;
      continue;
    }
    const double slack = val - f_bar;
    v.margin = std::min(v.margin, slack);
    if (boundary) v.boundary_margin = std::min(v.boundary_margin, slack);
  }
  if (failures > std::max(1, total / 100)) {
    throw ShootingError("contact_test: more than 1% of probes failed the "
                        "distance solve");
  }
  v.is_contact = v.margin >= -opts.contact_tolerance * v.scale;
  return v;
}

double far_ball_radius(const WarpedModel& model, const GeoDomain& D, double r,
                       const geodesy::DistanceOptions& dist) {
  const double R1 = D.R1;
  const auto far = [&](double rho) {
    return geodesy::slice_distance(model, R1, rho, M_PI, dist);
  };
  if (far(0.0) >= r) return 0.0;
  double lo = 0.0, hi = r + R1;
  for (int it = 0; it < 60 && hi - lo > 1e-11 * (1.0 + hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (far(mid) < r)
      lo = mid;
    else
      hi = mid;
  }
  const double rho_max = lo;

  // the antipodal boundary point should dominate a sample of domain points
  for (int i = 1; i <= 4; ++i) {
    const double s = D.R0 + (R1 - D.R0) * i / 4.0;
    for (int j = 1; j <= 3; ++j) {
      const double psi = M_PI * j / 3.0;
      const double d = geodesy::slice_distance(model, s, rho_max, psi, dist);
      if (d > far(rho_max) + 1e-6 * (1.0 + d)) {
        throw Error("far_ball_radius: far-field maximum not at the antipodal "
                    "boundary point; domain reduction invalid");
      }
    }
  }
  return rho_max;
}

namespace {

// inverse-CDF sampler for the radial volume density phi^{k-1} on [0, hi]
class RadialSampler {
 public:
  RadialSampler(const WarpedModel& model, double hi) : model_(model), hi_(hi) {
    const int N = 2048;
    std::vector<double> rs(N + 1), V(N + 1), dV(N + 1);
    const int k = model.dim;
    for (int i = 0; i <= N; ++i) {
      rs[i] = hi * double(i) / N;
      dV[i] = std::pow(model.profile.phi(rs[i]), k - 1);
    }
    V[0] = 0.0;
    for (int i = 1; i <= N; ++i) {
      V[i] = V[i - 1] +
             num::integrate_value(
                 [&](double s) { return std::pow(model_.profile.phi(s), k - 1); },
                 rs[i - 1], rs[i], 1e-14, 1e-12);
    }
    total_ = V[N];
    cdf_ = num::HermiteSpline(rs, V, dV);
  }

  double total_mass() const { return total_; }

  double sample(double uniform01) const {
    const double target = uniform01 * total_;
    double lo = 0.0, hi = hi_;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (cdf_.eval(mid) < target)
        lo = mid;
      else
        hi = mid;
    }
    return 0.5 * (lo + hi);
  }

 private:
  const WarpedModel& model_;
  double hi_;
  double total_ = 0.0;
  num::HermiteSpline cdf_;
};

}  // namespace

CoverageReport coverage_experiment(const WarpedModel& model,
                                   const RadialPotential& sol,
                                   const GeoDomain& D,
                                   const TransportConfig& cfg,
                                   const CoverageOptions& opts) {
  CoverageReport rep;
  const double rho_max = far_ball_radius(model, D, cfg.r, opts.dist);
  rep.rho_max = rho_max;
  if (rho_max <= 0.0) {
    rep.vacuous = true;
    return rep;
  }

  const RadialSampler sampler(model, rho_max);
  num::Philox rng(cfg.seed, 1);
  const double R0 = sol.R0_bound(), R1 = sol.R1_bound();

  const auto ray_functional = [&](double s, double rho_p) {
    return cfg.r * sol.u(s) + 0.5 * (rho_p - s) * (rho_p - s);
  };

  rep.worst_spot_margin = std::numeric_limits<double>::infinity();
  for (int it = 0; it < cfg.sample_count; ++it) {
    const double rho_p = sampler.sample(rng.uniform_at(it));
    ++rep.targets;

    // dense scan + Newton polish of the ray-restricted functional
    const int n_scan = 400;
    double best_s = R0, best_val = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= n_scan; ++i) {
      const double s = R0 + (R1 - R0) * double(i) / n_scan;
      const double val = ray_functional(s, rho_p);
      if (val < best_val) {
        best_val = val;
        best_s = s;
      }
    }
    double s_bar = best_s;
    for (int newton = 0; newton < 60; ++newton) {
      const double g = cfg.r * sol.du(s_bar) - (rho_p - s_bar);
      const double h = cfg.r * sol.d2u(s_bar) + 1.0;
      double step = g / h;
      s_bar -= step;
      s_bar = std::clamp(s_bar, R0, R1);
      if (std::abs(step) < 1e-13 * (1.0 + s_bar)) break;
    }

    const double edge = 1e-9 * (R1 - R0);
    if (s_bar >= R1 - edge || (R0 > 0.0 && s_bar <= R0 + edge)) {
      ++rep.boundary_hits;
      continue;
    }
    if (std::abs(sol.du(s_bar)) >= 1.0) {
      ++rep.not_in_U;
      continue;
    }
    const double image = s_bar + cfg.r * sol.du(s_bar);
    const double err = std::abs(image - rho_p);
    rep.worst_image_error = std::max(rep.worst_image_error, err);
    if (err <= opts.image_tol) ++rep.verified;

    // full 2-d slice minimality check on a subsample
    if (rep.spot_checked < opts.spot_targets) {
      ++rep.spot_checked;
      double spot_margin = std::numeric_limits<double>::infinity();
      for (int i = 0; i <= opts.spot_radial; ++i) {
        for (int j = 1; j <= opts.spot_angular; ++j) {
          const double s = R0 + (R1 - R0) * double(i) / opts.spot_radial;
          const double psi = M_PI * double(j) / opts.spot_angular;
          const double d =
              geodesy::slice_distance(model, s, rho_p, psi, opts.dist);
          const double val = cfg.r * sol.u(s) + 0.5 * d * d;
          spot_margin = std::min(spot_margin, val - best_val);
        }
      }
      rep.worst_spot_margin = std::min(rep.worst_spot_margin, spot_margin);
    }
  }
  rep.fraction =
      rep.targets > 0 ? double(rep.verified) / double(rep.targets) : 0.0;
  return rep;
}

CaptureReport capture_inequality(const WarpedModel& model,
                                 const RadialPotential& sol,
                                 const GeoDomain& D,
                                 const TransportConfig& cfg) {
  CaptureReport rep;
  rep.seed = cfg.seed;
  const int n = model.dim;
  const double R1 = D.R1;

  const double rho_max = far_ball_radius(model, D, cfg.r);
  const double rho_min = cfg.sigma > 0.0 ? cfg.sigma * cfg.r + R1 : 0.0;
  rep.rho_max = rho_max;
  rep.rho_min = rho_min;
  if (rho_max <= rho_min) {
    rep.status = "vacuous";
    return rep;
  }

  rep.lhs_exact =
      models::ball_volume(model, rho_max) -
      (rho_min > 0.0 ? models::ball_volume(model, rho_min) : 0.0);

  // Monte Carlo over the bracketing ball with the exact radial inverse-CDF
  const double rho_hi = cfg.r + R1;
  const RadialSampler sampler(model, rho_hi);
  num::Philox rng(cfg.seed, 2);
  long hits = 0;
  const long N = cfg.sample_count;
  for (long i = 0; i < N; ++i) {
    const double rho = sampler.sample(rng.uniform_at(static_cast<std::uint64_t>(i)));
    if (rho > rho_min && rho < rho_max) ++hits;
  }
  const double bracket_vol = models::ball_volume(model, rho_hi);
  const double p_hat = double(hits) / double(N);
  rep.lhs_mc = bracket_vol * p_hat;
  rep.lhs_stderr = bracket_vol * std::sqrt(p_hat * (1.0 - p_hat) / double(N));

  // RHS = int_U (1 + r f^{1/(n-1)})^n
  const double coeff = n * models::unit_ball_volume(n);
  rep.rhs = coeff * num::integrate_value(
      [&](double s) {
        if (std::abs(sol.du(s)) >= 1.0) return 0.0;
        return std::pow(1.0 + cfg.r * sol.density().speed_scale(s, n), n) *
               std::pow(model.profile.phi(s), n - 1);
      },
      sol.R0_bound(), sol.R1_bound());

  rep.slack = rep.rhs - rep.lhs_mc;
  rep.lhs_over_rn = rep.lhs_mc / std::pow(cfg.r, n);

  if (rep.lhs_mc <= rep.rhs + 3.0 * rep.lhs_stderr) {
    rep.status = "pass";
  } else if (rep.lhs_stderr > 0.05 * rep.rhs) {
    rep.status = "inconclusive";
  } else {
    rep.status = "fail";
  }
  return rep;
}

}  // namespace geosob::transport
