#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "fbvp/errors.hpp"
#include "fbvp/grid_function.hpp"

namespace fbvp {

// The nonlinearity F(t, phi) acting on history segments phi in C([-r,0]).
//
// DelayForm wraps a pointwise map f(t, u, v) via F(t,phi) = f(t, phi(0),
// phi(-r)); its growth numbers are computable by grid scans. EnvelopeForm
// carries user-certified bounds for the growth numbers together with an
// evaluator for the operator itself.
struct Nonlinearity {
  enum class Form { Delay, Envelope };

  Form form = Form::Delay;

  // Delay form.
  std::function<double(double, double, double)> f;  // (t, u, v)
  double r = 0.0;

  // Envelope form.
  std::function<double(double, double)> sup_env;  // (lower, rho)
  std::function<double(double, double, double, double)> inf_env;  // (a,b,rho,c)
  std::function<double(double, const HistorySegment&)> evaluator;

  // Knobs for the grid estimates: >= 1 inflates sup numbers, <= 1 deflates
  // inf numbers. Grid results are estimates, not rigorous enclosures.
  double safety_sup = 1.0;
  double safety_inf = 1.0;

  static Nonlinearity delay(std::function<double(double, double, double)> fn,
                            double delay_r) {
    if (!(delay_r > 0.0)) throw ConfigError("delay r must be > 0");
    Nonlinearity F;
    F.form = Form::Delay;
    F.f = std::move(fn);
    F.r = delay_r;
    return F;
  }

  static Nonlinearity envelope(
      std::function<double(double, double)> sup,
      std::function<double(double, double, double, double)> inf,
      std::function<double(double, const HistorySegment&)> eval, double delay_r) {
    Nonlinearity F;
    F.form = Form::Envelope;
    F.sup_env = std::move(sup);
    F.inf_env = std::move(inf);
    F.evaluator = std::move(eval);
    F.r = delay_r;
    return F;
  }
};

namespace detail {

// Scans f/rho over [t0,t1] x [u0,u1] x [v0,v1]; one 4x refinement around the
// extremal cell. maximize=false scans for the minimum.
inline double scan_extremum(const std::function<double(double, double, double)>& f,
                            double rho, double t0, double t1, double u0,
                            double u1, double v0, double v1, int t_grid,
                            int uv_grid, bool maximize) {
  const int nt = std::max(t_grid, 2), nu = std::max(uv_grid, 2);
  auto better = [maximize](double a, double b) {
    return maximize ? a > b : a < b;
  };
  double best = maximize ? -std::numeric_limits<double>::infinity()
                         : std::numeric_limits<double>::infinity();
  int bi = 0, bj = 0, bk = 0;
  for (int i = 0; i < nt; ++i) {
    const double t = t0 + (t1 - t0) * i / (nt - 1);
    for (int j = 0; j < nu; ++j) {
      const double u = u0 + (u1 - u0) * j / (nu - 1);
      for (int k = 0; k < nu; ++k) {
        const double v = v0 + (v1 - v0) * k / (nu - 1);
        const double val = f(t, u, v) / rho;
        if (better(val, best)) {
          best = val;
          bi = i;
          bj = j;
          bk = k;
        }
      }
    }
  }
  // Refine once, 4x finer, on the +-1 cell neighborhood of the extremum.
  const double ht = (t1 - t0) / (nt - 1), hu = (u1 - u0) / (nu - 1),
               hv = (v1 - v0) / (nu - 1);
  const double rt0 = std::max(t0, t0 + (bi - 1) * ht),
               rt1 = std::min(t1, t0 + (bi + 1) * ht);
  const double ru0 = std::max(u0, u0 + (bj - 1) * hu),
               ru1 = std::min(u1, u0 + (bj + 1) * hu);
  const double rv0 = std::max(v0, v0 + (bk - 1) * hv),
               rv1 = std::min(v1, v0 + (bk + 1) * hv);
  const int nr = 9;
  for (int i = 0; i < nr; ++i) {
    const double t = rt0 + (rt1 - rt0) * i / (nr - 1);
    for (int j = 0; j < nr; ++j) {
      const double u = ru0 + (ru1 - ru0) * j / (nr - 1);
      for (int k = 0; k < nr; ++k) {
        const double v = rv0 + (rv1 - rv0) * k / (nr - 1);
        const double val = f(t, u, v) / rho;
        if (better(val, best)) best = val;
      }
    }
  }
  return best;
}

}  // namespace detail

// The growth number F^(lower,rho) = sup { F(t,phi)/rho : t in [0,1],
// phi(theta) in [lower, rho] }, with lower = -rho for the sign-changing
// setting and lower = 0 for the positive cone.
inline double sup_number(const Nonlinearity& F, double rho, double lower,
                         int t_grid = 65, int uv_grid = 65) {
  if (!(rho > 0.0)) throw RhoNonpositiveError(rho);
  if (F.form == Nonlinearity::Form::Envelope) return F.sup_env(lower, rho);
  const double v = detail::scan_extremum(F.f, rho, 0.0, 1.0, lower, rho, lower,
                                         rho, t_grid, uv_grid, true);
  return v * F.safety_sup;
}

// The growth number F_(rho, rho/c) = inf { F(t,phi)/rho : t in [a,b],
// phi(theta) in [rho, rho/c] }. The primed positive-cone variant coincides
// with this for the delay form, since [rho, rho/c] lies in [0, inf).
inline double inf_number(const Nonlinearity& F, double rho, double c, double a,
                         double b, int t_grid = 65, int uv_grid = 65) {
  if (!(rho > 0.0)) throw RhoNonpositiveError(rho);
  if (!(c > 0.0 && c <= 1.0)) throw CInvalidError(c);
  if (F.form == Nonlinearity::Form::Envelope) return F.inf_env(a, b, rho, c);
  const double v = detail::scan_extremum(F.f, rho, a, b, rho, rho / c, rho,
                                         rho / c, t_grid, uv_grid, false);
  return v * F.safety_inf;
}

// F(t, phi) for a concrete history segment.
inline double evaluate(const Nonlinearity& F, double t,
                       const HistorySegment& seg) {
  double v = 0.0;
  if (F.form == Nonlinearity::Form::Delay) {
    v = F.f(t, seg(0.0), seg(-F.r));
  } else {
    v = F.evaluator(t, seg);
  }
  if (v < 0.0) throw NegativeValueError(t, v);
  return v;
}

}  // namespace fbvp
