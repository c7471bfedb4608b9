#pragma once

#include <Eigen/Core>

#include <cmath>
#include <functional>
#include <vector>

#include "geosob/errors.hpp"

namespace geosob::num {

using OdeRhs =
    std::function<void(double, const Eigen::VectorXd&, Eigen::VectorXd&)>;

struct OdeOptions {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  double initial_step = 0.0;  // 0 selects automatically
  double max_step = 0.0;      // 0 means unbounded
  long max_steps = 5'000'000;
  // keep the full dense history; event integrations only need the last step
  bool dense_history = true;
};

/// One accepted Dormand-Prince step together with its quartic dense-output
/// polynomial (Hairer's continuous extension).
struct DenseStep {
  double t0 = 0.0;
  double h = 0.0;
  Eigen::VectorXd r1, r2, r3, r4, r5;

  Eigen::VectorXd eval(double t) const {
    const double th = (t - t0) / h;
    const double th1 = 1.0 - th;
    return r1 + th * (r2 + th1 * (r3 + th * (r4 + th1 * r5)));
  }

  Eigen::VectorXd eval_deriv(double t) const {
    const double th = (t - t0) / h;
    return (r2 + (1.0 - 2.0 * th) * r3 + th * (2.0 - 3.0 * th) * r4 +
            2.0 * th * (1.0 - th) * (1.0 - 2.0 * th) * r5) /
           h;
  }
};

class OdeSolution {
 public:
  double t_begin() const { return steps_.empty() ? t0_ : steps_.front().t0; }
  double t_end() const { return t_end_; }
  const Eigen::VectorXd& y_end() const { return y_end_; }

  Eigen::VectorXd eval(double t) const {
    const DenseStep& s = step_at(t);
    return s.eval(t);
  }

  const DenseStep& step_at(double t) const {
    // binary search for the step containing t
    std::size_t lo = 0, hi = steps_.size();
    while (hi - lo > 1) {
      std::size_t mid = (lo + hi) / 2;
      if (steps_[mid].t0 <= t)
        lo = mid;
      else
        hi = mid;
    }
    return steps_[lo];
  }

  const std::vector<DenseStep>& steps() const { return steps_; }
  long accepted_steps() const { return n_accepted_; }
  long rejected_steps() const { return n_rejected_; }

 private:
  friend class Dopri5;
  double t0_ = 0.0;
  double t_end_ = 0.0;
  Eigen::VectorXd y_end_;
  std::vector<DenseStep> steps_;
  long n_accepted_ = 0;
  long n_rejected_ = 0;
};

/// Embedded Runge-Kutta 5(4) integrator (Dormand-Prince pair, FSAL) with
/// dense output. Throws IntegrationError on step underflow, carrying the
/// last valid time.
class Dopri5 {
 public:
  Dopri5() = default;
  explicit Dopri5(const OdeOptions& opts) : opts_(opts) {}

  OdeSolution integrate(const OdeRhs& rhs, double t0, double t1,
                        Eigen::VectorXd y0) const {
    return run(rhs, t0, t1, std::move(y0), nullptr, nullptr);
  }

  /// Integrates until `event` changes sign (relative to its value at t0) or
  /// t1 is reached. On a sign change the root is located on the dense
  /// interpolant by bisection. Returns true iff the event fired.
  bool integrate_event(const OdeRhs& rhs, double t0, double t1,
                       Eigen::VectorXd y0,
                       const std::function<double(double, const Eigen::VectorXd&)>& event,
                       double* t_event, Eigen::VectorXd* y_event,
                       OdeSolution* solution = nullptr) const {
    bool fired = false;
    OdeSolution sol = run(rhs, t0, t1, std::move(y0), &event, &fired);
    if (fired) {
      const DenseStep& s = sol.steps().back();
      double a = s.t0, b = s.t0 + s.h;
      double fa = event(a, s.eval(a));
      for (int i = 0; i < 80 && (b - a) > 1e-14 * (1.0 + std::abs(b)); ++i) {
        const double m = 0.5 * (a + b);
        const double fm = event(m, s.eval(m));
        if ((fa <= 0.0) == (fm <= 0.0)) {
          a = m;
          fa = fm;
        } else {
          b = m;
        }
      }
      const double te = 0.5 * (a + b);
      if (t_event) *t_event = te;
      if (y_event) *y_event = s.eval(te);
    } else {
      if (t_event) *t_event = sol.t_end();
      if (y_event) *y_event = sol.y_end();
    }
    if (solution) *solution = std::move(sol);
    return fired;
  }

 private:
  OdeSolution run(const OdeRhs& rhs, double t0, double t1, Eigen::VectorXd y0,
                  const std::function<double(double, const Eigen::VectorXd&)>* event,
                  bool* event_fired) const {
    const Eigen::Index n = y0.size();
    OdeSolution sol;
    sol.t0_ = t0;
    if (t1 <= t0) {
      sol.t_end_ = t0;
      sol.y_end_ = std::move(y0);
      return sol;
    }

    Eigen::VectorXd k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n);
    Eigen::VectorXd y(n), ynew(n), yerr(n), tmp(n);
    y = y0;
    double t = t0;
    rhs(t, y, k1);

    double event_sign = 0.0;
    if (event) event_sign = (*event)(t0, y0) <= 0.0 ? -1.0 : 1.0;

    double h = opts_.initial_step;
    if (h <= 0.0) {
      const double d0 = y.cwiseAbs().maxCoeff() + 1e-8;
      const double d1 = k1.cwiseAbs().maxCoeff() + 1e-8;
      h = 0.01 * d0 / d1;
    }
    const double span = t1 - t0;
    h = std::min(h, span);
    if (opts_.max_step > 0.0) h = std::min(h, opts_.max_step);

    bool last_rejected = false;
    bool final_step = false;
    for (long step = 0; step < opts_.max_steps; ++step) {
      if (t >= t1) break;
      if (t + h > t1) {
        h = t1 - t;
        final_step = true;
      } else {
        final_step = false;
      }
      if (h < 1e-14 * (std::abs(t) + 1.0)) {
        throw IntegrationError("step size underflow in dopri5", t);
      }

      stages(rhs, t, y, h, k1, k2, k3, k4, k5, k6, k7, ynew, yerr, tmp);

      // scaled RMS error norm
      double err = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double sc = opts_.abs_tol +
                          opts_.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
        const double e = yerr[i] / sc;
        err += e * e;
      }
      err = std::sqrt(err / static_cast<double>(n));

      if (err <= 1.0) {
        DenseStep ds;
        ds.t0 = t;
        ds.h = h;
        dense_coeffs(y, ynew, h, k1, k3, k4, k5, k6, k7, ds);
        if (opts_.dense_history || sol.steps_.empty()) {
          sol.steps_.push_back(std::move(ds));
        } else {
          sol.steps_.back() = std::move(ds);
        }
        ++sol.n_accepted_;

        t = final_step ? t1 : t + h;
        y.swap(ynew);
        k1.swap(k7);  // FSAL

        if (event) {
          const double ev = (*event)(t, y);
          if ((ev <= 0.0 ? -1.0 : 1.0) != event_sign) {
            *event_fired = true;
            sol.t_end_ = t;
            sol.y_end_ = y;
            return sol;
          }
        }

        double fac = 0.9 * std::pow(err + 1e-300, -0.2);
        fac = std::min(last_rejected ? 1.0 : 5.0, std::max(0.2, fac));
        h *= fac;
        if (opts_.max_step > 0.0) h = std::min(h, opts_.max_step);
        last_rejected = false;
      } else {
        ++sol.n_rejected_;
        const double fac = std::max(0.1, 0.9 * std::pow(err, -0.2));
        h *= fac;
        last_rejected = true;
      }
    }
    if (t < t1) {
      throw IntegrationError("dopri5 exceeded the step budget", t);
    }
    sol.t_end_ = t;
    sol.y_end_ = std::move(y);
    return sol;
  }

  static void stages(const OdeRhs& rhs, double t, const Eigen::VectorXd& y,
                     double h, const Eigen::VectorXd& k1, Eigen::VectorXd& k2,
                     Eigen::VectorXd& k3, Eigen::VectorXd& k4,
                     Eigen::VectorXd& k5, Eigen::VectorXd& k6,
                     Eigen::VectorXd& k7, Eigen::VectorXd& ynew,
                     Eigen::VectorXd& yerr, Eigen::VectorXd& tmp) {
    static constexpr double a21 = 1.0 / 5.0;
    static constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
    static constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0,
                            a43 = 32.0 / 9.0;
    static constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                            a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
    static constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0,
                            a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                            a65 = -5103.0 / 18656.0;
    static constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0,
                            a74 = 125.0 / 192.0, a75 = -2187.0 / 6784.0,
                            a76 = 11.0 / 84.0;
    static constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0,
                            c5 = 8.0 / 9.0;
    static constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0,
                            e4 = 71.0 / 1920.0, e5 = -17253.0 / 339200.0,
                            e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

    tmp = y + h * a21 * k1;
    rhs(t + c2 * h, tmp, k2);
    tmp = y + h * (a31 * k1 + a32 * k2);
    rhs(t + c3 * h, tmp, k3);
    tmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
    rhs(t + c4 * h, tmp, k4);
    tmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    rhs(t + c5 * h, tmp, k5);
    tmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    rhs(t + h, tmp, k6);
    ynew = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    rhs(t + h, ynew, k7);
    yerr = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
  }

  static void dense_coeffs(const Eigen::VectorXd& y0, const Eigen::VectorXd& y1,
                           double h, const Eigen::VectorXd& k1,
                           const Eigen::VectorXd& k3, const Eigen::VectorXd& k4,
                           const Eigen::VectorXd& k5, const Eigen::VectorXd& k6,
                           const Eigen::VectorXd& k7, DenseStep& ds) {
    static constexpr double d1 = -12715105075.0 / 11282082432.0;
    static constexpr double d3 = 87487479700.0 / 32700410799.0;
    static constexpr double d4 = -10690763975.0 / 1880347072.0;
    static constexpr double d5 = 701980252875.0 / 199316789632.0;
    static constexpr double d6 = -1453857185.0 / 822651844.0;
    static constexpr double d7 = 69997945.0 / 29380423.0;
    ds.r1 = y0;
    ds.r2 = y1 - y0;
    ds.r3 = h * k1 - ds.r2;
    ds.r4 = ds.r2 - h * k7 - ds.r3;
    ds.r5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
  }

  OdeOptions opts_;
};

}  // namespace geosob::num
