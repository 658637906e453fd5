#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "fbvp/errors.hpp"

namespace fbvp {

// Discrete carrier for a continuous function on [lo,hi]: values on a uniform
// node grid, linear interpolation in between. Immutable after construction.
class GridFunction {
 public:
  GridFunction() = default;

  GridFunction(double lo, double hi, std::vector<double> values)
      : lo_(lo), hi_(hi), v_(std::move(values)) {
    if (v_.size() < 3)
      throw ConfigError("grid function needs at least 3 nodes");
    if (!(lo_ < hi_)) throw ConfigError("grid function needs lo < hi");
  }

  template <class F>
  static GridFunction sample(double lo, double hi, std::size_t n, const F& f) {
    std::vector<double> v(n);
    const double h = (hi - lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) v[i] = f(lo + h * static_cast<double>(i));
    return GridFunction(lo, hi, std::move(v));
  }

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  std::size_t size() const { return v_.size(); }
  double step() const { return (hi_ - lo_) / static_cast<double>(v_.size() - 1); }
  double node(std::size_t i) const { return lo_ + step() * static_cast<double>(i); }
  const std::vector<double>& values() const { return v_; }
  double value(std::size_t i) const { return v_[i]; }

  double eval(double x) const {
    if (x <= lo_) return v_.front();
    if (x >= hi_) return v_.back();
    const double pos = (x - lo_) / step();
    std::size_t i = static_cast<std::size_t>(pos);
    i = std::min(i, v_.size() - 2);
    const double w = pos - static_cast<double>(i);
    return (1.0 - w) * v_[i] + w * v_[i + 1];
  }

  double operator()(double x) const { return eval(x); }

  // Sup norm over [x0,x1]; the extremes of a piecewise-linear function are
  // attained at nodes or at the clipped interval ends.
  double sup_norm(double x0, double x1) const {
    double m = std::max(std::abs(eval(x0)), std::abs(eval(x1)));
    for (std::size_t i = first_node_in(x0); i < v_.size() && node(i) <= x1; ++i)
      m = std::max(m, std::abs(v_[i]));
    return m;
  }

  double min_on(double x0, double x1) const {
    double m = std::min(eval(x0), eval(x1));
    for (std::size_t i = first_node_in(x0); i < v_.size() && node(i) <= x1; ++i)
      m = std::min(m, v_[i]);
    return m;
  }

  double max_on(double x0, double x1) const {
    double m = std::max(eval(x0), eval(x1));
    for (std::size_t i = first_node_in(x0); i < v_.size() && node(i) <= x1; ++i)
      m = std::max(m, v_[i]);
    return m;
  }

 private:
  std::size_t first_node_in(double x0) const {
    if (x0 <= lo_) return 0;
    const double pos = (x0 - lo_) / step();
    return static_cast<std::size_t>(std::ceil(pos - 1e-12));
  }

  double lo_ = 0.0;
  double hi_ = 1.0;
  std::vector<double> v_;
};

// View of the history of u at time t: theta -> u(t + theta) on [-r, 0].
class HistorySegment {
 public:
  HistorySegment(const GridFunction& u, double t, double r)
      : u_(&u), t_(t), r_(r) {}

  double operator()(double theta) const { return u_->eval(t_ + theta); }
  double delay() const { return r_; }
  double time() const { return t_; }

 private:
  const GridFunction* u_;
  double t_;
  double r_;
};

}  // namespace fbvp
