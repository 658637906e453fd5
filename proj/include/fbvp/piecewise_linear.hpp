#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "fbvp/errors.hpp"

namespace fbvp {

// Continuous piecewise-linear function given by breakpoints and values.
// Evaluation outside the breakpoint range clamps to the nearest endpoint.
class PiecewiseLinear {
 public:
  PiecewiseLinear() = default;

  PiecewiseLinear(std::vector<double> breakpoints, std::vector<double> values)
      : x_(std::move(breakpoints)), y_(std::move(values)) {
    if (x_.size() < 2 || x_.size() != y_.size())
      throw ConfigError("piecewise-linear function needs matching breakpoint "
                        "and value lists of length >= 2");
    for (std::size_t i = 0; i + 1 < x_.size(); ++i)
      if (!(x_[i] < x_[i + 1]))
        throw ConfigError("piecewise-linear breakpoints must be strictly "
                          "increasing");
  }

  static PiecewiseLinear constant(double lo, double hi, double c) {
    return PiecewiseLinear({lo, hi}, {c, c});
  }

  double lo() const { return x_.front(); }
  double hi() const { return x_.back(); }
  const std::vector<double>& breakpoints() const { return x_; }
  const std::vector<double>& values() const { return y_; }

  double operator()(double x) const {
    if (x <= x_.front()) return y_.front();
    if (x >= x_.back()) return y_.back();
    const std::size_t i = segment_of(x);
    const double w = (x - x_[i]) / (x_[i + 1] - x_[i]);
    return (1.0 - w) * y_[i] + w * y_[i + 1];
  }

  // Exact integral over the full breakpoint range.
  double integral() const {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < x_.size(); ++i)
      s += 0.5 * (y_[i] + y_[i + 1]) * (x_[i + 1] - x_[i]);
    return s;
  }

  // Exact integral of |f|; segments are split at their zero crossings.
  double integral_abs() const {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < x_.size(); ++i) {
      const double h = x_[i + 1] - x_[i];
      const double a = y_[i], b = y_[i + 1];
      if (a * b >= 0.0) {
        s += 0.5 * std::abs(a + b) * h;
      } else {
        // Linear segment crossing zero at fraction a/(a-b).
        const double w = a / (a - b);
        s += 0.5 * std::abs(a) * w * h + 0.5 * std::abs(b) * (1.0 - w) * h;
      }
    }
    return s;
  }

  double min_value() const { return *std::min_element(y_.begin(), y_.end()); }
  double max_value() const { return *std::max_element(y_.begin(), y_.end()); }
  double max_abs() const {
    return std::max(std::abs(min_value()), std::abs(max_value()));
  }

  bool empty() const { return x_.empty(); }

 private:
  std::size_t segment_of(double x) const {
    const auto it = std::upper_bound(x_.begin(), x_.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - x_.begin());
    return std::min(std::max<std::size_t>(i, 1) - 1, x_.size() - 2);
  }

  std::vector<double> x_;
  std::vector<double> y_;
};

}  // namespace fbvp
