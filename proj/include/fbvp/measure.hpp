#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "fbvp/errors.hpp"
#include "fbvp/kernel.hpp"
#include "fbvp/piecewise_linear.hpp"
#include "fbvp/quadrature.hpp"

namespace fbvp {

// Signed Stieltjes measure on [0,1]: finitely many atoms plus a
// piecewise-linear density. This realizes the two boundary-functional shapes
//   alpha[u] = sum_j w_j u(eta_j)   and   alpha[u] = int_0^1 phi(s) u(s) ds
// and keeps the total variation exactly computable.
struct SignedMeasure {
  struct Atom {
    double location = 0.0;
    double weight = 0.0;
  };

  std::vector<Atom> atoms;
  std::optional<PiecewiseLinear> density;

  SignedMeasure() = default;

  static SignedMeasure zero() { return SignedMeasure{}; }

  static SignedMeasure from_atoms(std::vector<Atom> a) {
    SignedMeasure m;
    m.atoms = std::move(a);
    m.validate();
    return m;
  }

  static SignedMeasure from_density(PiecewiseLinear d) {
    SignedMeasure m;
    m.density = std::move(d);
    m.validate();
    return m;
  }

  static SignedMeasure from_parts(std::vector<Atom> a, PiecewiseLinear d) {
    SignedMeasure m;
    m.atoms = std::move(a);
    m.density = std::move(d);
    m.validate();
    return m;
  }

  bool is_zero() const { return atoms.empty() && !density.has_value(); }

  void validate() const {
    for (const Atom& a : atoms)
      if (a.location < 0.0 || a.location > 1.0)
        throw ConfigError("measure atom outside [0,1]");
    if (density) {
      if (density->lo() < -1e-12 || density->hi() > 1.0 + 1e-12)
        throw ConfigError("measure density breakpoints outside [0,1]");
    }
  }

  std::vector<double> breakpoints() const {
    std::vector<double> b;
    if (density) b = density->breakpoints();
    for (const Atom& a : atoms) b.push_back(a.location);
    return b;
  }
};

// Total variation: sum of |atom weights| plus the exact integral of |density|.
inline double total_variation(const SignedMeasure& A) {
  double v = 0.0;
  for (const auto& a : A.atoms) v += std::abs(a.weight);
  if (A.density) v += A.density->integral_abs();
  return v;
}

// alpha[u] = sum_j w_j u(eta_j) + int_0^1 density(s) u(s) ds.
// extra_breakpoints lets the caller pass kink loci of u so that the density
// part keeps full quadrature accuracy.
template <class U>
double apply(const SignedMeasure& A, const U& u,
             const std::vector<double>& extra_breakpoints = {}) {
  double v = 0.0;
  for (const auto& a : A.atoms) v += a.weight * u(a.location);
  if (A.density) {
    std::vector<double> brk = A.density->breakpoints();
    brk.insert(brk.end(), extra_breakpoints.begin(), extra_breakpoints.end());
    const auto& d = *A.density;
    v += quadrature::integrate_adaptive(
        [&](double s) { return d(s) * u(s); }, 0.0, 1.0, brk, 1e-11);
  }
  return v;
}

// The kernel moment K_A(s) = int_0^1 k(t,s) dA(t), evaluated on demand.
// Atoms are summed exactly; the density part is integrated with panels split
// at the kernel's kink loci in t.
inline std::function<double(double)> kernel_moment(const SignedMeasure& A,
                                                   const KernelFamily& fam) {
  return [A, fam](double s) {
    double v = 0.0;
    for (const auto& a : A.atoms) v += a.weight * fam.k(a.location, s);
    if (A.density) {
      std::vector<double> brk = A.density->breakpoints();
      const auto kinks = fam.t_kinks(s);
      brk.insert(brk.end(), kinks.begin(), kinks.end());
      const auto& d = *A.density;
      v += quadrature::integrate_adaptive(
          [&](double t) { return d(t) * fam.k(t, s); }, 0.0, 1.0, brk, 1e-11);
    }
    return v;
  };
}

// Sampled positivity check with sign-change bisection refinement. Violations
// on a set every sample grid misses are undetectable by construction.
struct PositivityReport {
  bool nonnegative = false;
  double worst_point = 0.0;
  double worst_value = 0.0;
  int samples = 0;
};

template <class F>
PositivityReport check_positivity(const F& f, int samples = 4097,
                                  double tol = 1e-12) {
  PositivityReport rep;
  const int n = std::max(samples, 2);
  rep.samples = n;
  double prev = f(0.0);
  rep.worst_point = 0.0;
  rep.worst_value = prev;
  for (int i = 1; i < n; ++i) {
    const double s = static_cast<double>(i) / (n - 1);
    const double fi = f(s);
    if (fi < rep.worst_value) {
      rep.worst_value = fi;
      rep.worst_point = s;
    }
    if ((prev > 0.0) != (fi > 0.0)) {
      // Bisect the bracketing interval to sharpen the worst point.
      double lo = static_cast<double>(i - 1) / (n - 1), hi = s;
      double flo = prev;
      for (int it = 0; it < 50; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm < rep.worst_value) {
          rep.worst_value = fm;
          rep.worst_point = mid;
        }
        if ((flo > 0.0) != (fm > 0.0)) {
          hi = mid;
        } else {
          lo = mid;
          flo = fm;
        }
      }
    }
    prev = fi;
  }
  rep.nonnegative = rep.worst_value >= -tol;
  return rep;
}

}  // namespace fbvp
