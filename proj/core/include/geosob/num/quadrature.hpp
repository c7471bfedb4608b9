#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <queue>
#include <utility>
#include <vector>

#include "geosob/errors.hpp"

namespace geosob::num {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
};

inline constexpr double kQuadAbsTol = 1e-12;
inline constexpr double kQuadRelTol = 1e-10;

/// Adaptive Gauss-Kronrod (7,15) integration: worklist refinement splitting
/// the interval with the largest error estimate. Throws QuadratureError
/// (carrying the achieved error estimate) if the tolerances cannot be met.
template <class F>
QuadratureResult integrate(const F& f, double a, double b,
                           double abs_tol = kQuadAbsTol,
                           double rel_tol = kQuadRelTol) {
  if (a == b) return {0.0, 0.0};
  using Rule = boost::math::quadrature::gauss_kronrod<double, 15>;

  struct Piece {
    double a, b, value, error;
    bool operator<(const Piece& other) const { return error < other.error; }
  };
  const auto eval = [&f](double lo, double hi) {
    Piece p;
    p.a = lo;
    p.b = hi;
    p.error = 0.0;
    double l1 = 0.0;
    p.value = Rule::integrate(f, lo, hi, 0, 0.0, &p.error, &l1);
    return p;
  };

  std::priority_queue<Piece> work;
  work.push(eval(a, b));
  double total = work.top().value;
  double err = work.top().error;

  const int max_pieces = 4000;
  for (int n = 1; n < max_pieces; ++n) {
    if (err <= abs_tol + rel_tol * std::abs(total)) break;
    Piece worst = work.top();
    work.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(worst.a < mid && mid < worst.b)) {
      // interval exhausted at double precision; keep its estimate
      worst.error = 0.0;
      work.push(worst);
      continue;
    }
    const Piece left = eval(worst.a, mid);
    const Piece right = eval(mid, worst.b);
    total += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
    work.push(left);
    work.push(right);
  }
  if (!(err <= abs_tol + rel_tol * std::abs(total))) {
    throw QuadratureError("adaptive quadrature did not converge", err);
  }
  return {total, err};
}

template <class F>
double integrate_value(const F& f, double a, double b,
                       double abs_tol = kQuadAbsTol,
                       double rel_tol = kQuadRelTol) {
  return integrate(f, a, b, abs_tol, rel_tol).value;
}

}  // namespace geosob::num
