#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "fbvp/certify.hpp"
#include "fbvp/problem.hpp"

namespace fbvp {
namespace reference {

// Built-in reference instances with known closed-form constants. They back
// the `reproduce` command and the regression suite.

// Thermostat(1/4, 1/4) on [a,b] = [1/4, 7/16] with g = 1, alpha = 0 and the
// delay nonlinearity f(t,u,v) = lambda |u|^(p-1) |v|. Closed forms:
//   c1 = min{ a beta/(beta+eta), (beta+eta-b)/(beta+eta) } = 1/8,  c2 = a = 1/4,
//   1/m = beta/(beta+eta) + eta^2/(2(beta+eta)) + 1/2 = 17/16,
//   1/M(a,b) = (a/2) (b - a - r)   for r <= 0.15 (bracket minimized at t=a).
inline ProblemInstance thermostat_case(double lambda, double p = 2.0,
                                       double r = 0.15,
                                       double psi_height = 0.0) {
  KernelFamily kernel = KernelFamily::thermostat(0.25, 0.25);
  ConeData cone = kernel.cone_constants(0.25, 0.4375);
  Nonlinearity F = Nonlinearity::delay(
      [lambda, p](double, double u, double v) {
        return lambda * std::pow(std::abs(u), p - 1.0) * std::abs(v);
      },
      r);
  PiecewiseLinear psi = zero_psi(r);
  if (psi_height != 0.0) {
    std::vector<double> b(129), v(129);
    for (int i = 0; i < 129; ++i) {
      b[i] = -r + r * i / 128.0;
      const double s = std::sin(M_PI * b[i] / r);
      v[i] = psi_height * s * s;
    }
    psi = PiecewiseLinear(std::move(b), std::move(v));
  }
  return ProblemInstance(std::move(kernel), std::move(cone), unit_weight(),
                         SignedMeasure::zero(), std::move(psi), r, std::move(F),
                         CoreMode::SignChanging);
}

// Dirichlet kernel on [1/4, 3/4] with g = 1, alpha = 0 and F given by an
// arbitrary delay map. 1/m = sup_t t(1-t)/2 = 1/8.
inline ProblemInstance dirichlet_case(
    std::function<double(double, double, double)> f, double r = 0.2,
    CoreMode mode = CoreMode::SignChanging) {
  KernelFamily kernel = KernelFamily::dirichlet_nonlocal(mode);
  ConeData cone = kernel.cone_constants(0.25, 0.75);
  return ProblemInstance(std::move(kernel), std::move(cone), unit_weight(),
                         SignedMeasure::zero(), zero_psi(r), r,
                         Nonlinearity::delay(std::move(f), r), mode);
}

struct Row {
  std::string quantity;
  double expected = 0.0;
  double computed = 0.0;
  double diff = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

inline Row make_row(std::string quantity, double expected, double computed,
                    double tolerance) {
  Row r{std::move(quantity), expected, computed,
        std::abs(computed - expected), tolerance, false};
  r.pass = r.diff < tolerance;
  return r;
}

// Recomputes the built-in closed-form constants and compares them against
// their exact values.
inline std::vector<Row> run_reference_checks() {
  std::vector<Row> rows;

  // Thermostat(1/4,1/4), [1/4,7/16]: sup-norm constant and cone constants.
  {
    const ProblemInstance P = thermostat_case(0.5);
    const ExtremalConstant m = compute_m(P);
    rows.push_back(make_row("1/m thermostat(1/4,1/4) g=1", 17.0 / 16.0,
                            m.reciprocal, 1e-8));
    rows.push_back(make_row("c1 thermostat(1/4,1/4) [1/4,7/16]", 0.125,
                            P.cone.c1, 1e-15));
    rows.push_back(make_row("c2 thermostat(1/4,1/4) [1/4,7/16]", 0.25,
                            P.cone.c2, 1e-15));
  }

  // Dirichlet cone constant c = min{a, 1-b} on [1/4, 3/4].
  {
    const KernelFamily fam = KernelFamily::dirichlet_nonlocal();
    const ConeData cone = fam.cone_constants(0.25, 0.75);
    rows.push_back(make_row("c dirichlet [1/4,3/4]", 0.25, cone.c, 1e-15));
  }

  // Non-negative thermostat c1 = min{a, 1 - b/(beta+eta)} spot value:
  // beta=1, eta=1/2, [a,b]=[0.6,0.9] -> min{0.6, 0.4} = 0.4.
  {
    const KernelFamily fam =
        KernelFamily::thermostat(1.0, 0.5, CoreMode::NonNegative);
    const ConeData cone = fam.cone_constants(0.6, 0.9);
    rows.push_back(
        make_row("c1 thermostat-positive(1,1/2) [0.6,0.9]", 0.4, cone.c1,
                 1e-12));
  }

  return rows;
}

}  // namespace reference
}  // namespace fbvp
