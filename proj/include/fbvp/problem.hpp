#pragma once

#include <cmath>
#include <utility>

#include "fbvp/envelope.hpp"
#include "fbvp/errors.hpp"
#include "fbvp/kernel.hpp"
#include "fbvp/measure.hpp"
#include "fbvp/piecewise_linear.hpp"

namespace fbvp {

// The full datum of the integral equation
//   u(t) = psi(t) + int_0^1 k(t,s) g(s) F(s, u_s) ds + gamma(t) alpha[u]
// on [-r, 1]. psi lives on [-r,0] and is extended by zero on [0,1].
struct ProblemInstance {
  KernelFamily kernel;
  ConeData cone;
  PiecewiseLinear g;     // weight on [0,1], non-negative
  SignedMeasure alpha;   // boundary functional
  PiecewiseLinear psi;   // initial datum on [-r,0]
  double r = 0.0;        // delay
  Nonlinearity F;
  CoreMode mode = CoreMode::SignChanging;

  ProblemInstance(KernelFamily kernel_, ConeData cone_, PiecewiseLinear g_,
                  SignedMeasure alpha_, PiecewiseLinear psi_, double r_,
                  Nonlinearity F_, CoreMode mode_)
      : kernel(std::move(kernel_)),
        cone(std::move(cone_)),
        g(std::move(g_)),
        alpha(std::move(alpha_)),
        psi(std::move(psi_)),
        r(r_),
        F(std::move(F_)),
        mode(mode_) {
    if (!(r > 0.0)) throw ConfigError("delay r must be > 0");
    if (mode == CoreMode::NonNegative &&
        kernel.mode() != CoreMode::NonNegative)
      throw ConfigError(
          "non-negative problem mode requires a non-negative kernel mode");
    if (std::abs(psi.lo() + r) > 1e-9 || std::abs(psi.hi()) > 1e-9)
      throw ConfigError("psi must be given on [-r, 0]");
  }

  // psi extended by zero on [0,1].
  double psi_extended(double t) const { return t >= 0.0 ? 0.0 : psi(t); }

  // ||psi||_[-r,0]; exact for the piecewise-linear representation.
  double psi_norm() const { return psi.max_abs(); }

  double psi_at_zero() const { return psi(0.0); }

  // alpha[gamma], needed by both index constants.
  double alpha_gamma() const {
    return fbvp::apply(alpha, [this](double t) { return kernel.gamma(t); },
                       kernel.t_kinks(0.0));
  }
};

// Convenience builders for the zero weight/datum defaults.
inline PiecewiseLinear unit_weight() {
  return PiecewiseLinear::constant(0.0, 1.0, 1.0);
}

inline PiecewiseLinear zero_psi(double r) {
  return PiecewiseLinear::constant(-r, 0.0, 0.0);
}

}  // namespace fbvp
