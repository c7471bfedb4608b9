#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "geosob/errors.hpp"

namespace geosob::num {

/// C1 cubic Hermite interpolant on a sorted grid, built from function values
/// and exact derivative values (O(h^4) accurate for smooth data).
class HermiteSpline {
 public:
  HermiteSpline() = default;
  HermiteSpline(std::vector<double> x, std::vector<double> y,
                std::vector<double> dy)
      : x_(std::move(x)), y_(std::move(y)), dy_(std::move(dy)) {
    if (x_.size() < 2 || x_.size() != y_.size() || x_.size() != dy_.size()) {
      throw Error("HermiteSpline: inconsistent grid data");
    }
  }

  double min_x() const { return x_.front(); }
  double max_x() const { return x_.back(); }

  double eval(double x) const {
    const auto [i, s, h] = locate(x);
    const double s2 = s * s, s3 = s2 * s;
    const double h00 = 2 * s3 - 3 * s2 + 1;
    const double h10 = s3 - 2 * s2 + s;
    const double h01 = -2 * s3 + 3 * s2;
    const double h11 = s3 - s2;
    return h00 * y_[i] + h * h10 * dy_[i] + h01 * y_[i + 1] + h * h11 * dy_[i + 1];
  }

  double deriv(double x) const {
    const auto [i, s, h] = locate(x);
    const double s2 = s * s;
    const double g00 = (6 * s2 - 6 * s) / h;
    const double g10 = 3 * s2 - 4 * s + 1;
    const double g01 = (-6 * s2 + 6 * s) / h;
    const double g11 = 3 * s2 - 2 * s;
    return g00 * y_[i] + g10 * dy_[i] + g01 * y_[i + 1] + g11 * dy_[i + 1];
  }

 private:
  struct Loc {
    std::size_t i;
    double s;
    double h;
  };

  Loc locate(double x) const {
    x = std::clamp(x, x_.front(), x_.back());
    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    std::size_t i = static_cast<std::size_t>(
        std::clamp<std::ptrdiff_t>(it - x_.begin() - 1, 0,
                                   static_cast<std::ptrdiff_t>(x_.size()) - 2));
    const double h = x_[i + 1] - x_[i];
    return {i, (x - x_[i]) / h, h};
  }

  std::vector<double> x_, y_, dy_;
};

/// Composite Simpson on a uniform grid with an even number of intervals;
/// falls back to trapezoid on the last interval when the count is odd.
inline double simpson_uniform(const std::vector<double>& values, double dt) {
  const std::size_t n = values.size();
  if (n < 2) return 0.0;
  double sum = 0.0;
  std::size_t i = 0;
  for (; i + 2 < n; i += 2) {
    sum += dt / 3.0 * (values[i] + 4.0 * values[i + 1] + values[i + 2]);
  }
  if (i + 1 < n) sum += 0.5 * dt * (values[i] + values[i + 1]);
  return sum;
}

}  // namespace geosob::num
