#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "fbvp/errors.hpp"
#include "fbvp/quadrature.hpp"

namespace fbvp {

// Heaviside step with H(0) = 1.
inline double heaviside(double tau) { return tau >= 0.0 ? 1.0 : 0.0; }

enum class CoreMode { SignChanging, NonNegative };

// Cone data attached to a subinterval [a,b] of (0,1]: the kernel envelope Phi
// and the constants c1 (kernel lower bound), c2 (gamma lower bound),
// c = min(c1,c2) entering the cone inequality min_[a,b] u >= c ||u||.
struct ConeData {
  double a = 0.0;
  double b = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double c = 0.0;
  std::function<double(double)> phi;
};

// A boundary value problem family: the Green's kernel k(t,s), the boundary
// perturbation profile gamma(t), the envelope Phi and the cone constants.
//
// Thermostat family:   -u'' = y,  u(0) = 0,  beta u'(1) + u(eta) = alpha[u]
//     k(t,s) = [ beta t/(beta+eta) + t (eta-s) H(eta-s)/(beta+eta)
//                - (t-s) H(t-s) ] H(t)
//     gamma(t) = t H(t)/(beta+eta)
// Dirichlet family:    -u'' = y,  u(0) = 0,  u(1) = alpha[u]
//     k(t,s) = [ t(1-s) - (t-s) H(t-s) ] H(t)
//     gamma(t) = t H(t)
//
// Both kernels vanish for t <= 0; the extension convention makes every
// operator image vanish on the history interval.
class KernelFamily {
 public:
  enum class Variant { Thermostat, DirichletNonlocal, Custom };

  struct CustomSpec {
    std::function<double(double, double)> k;
    std::function<double(double)> gamma;
    std::function<double(double)> phi;
    std::function<double(double, double)> c1;  // (a,b)
    std::function<double(double, double)> c2;  // (a,b)
    std::vector<double> s_kinks;               // kink loci of k(t,.) besides s=t
  };

  static KernelFamily thermostat(double beta, double eta,
                                 CoreMode mode = CoreMode::SignChanging) {
    if (!(beta > 0.0)) throw ConfigError("thermostat needs beta > 0");
    if (!(eta > 0.0 && eta < 1.0))
      throw ConfigError("thermostat needs eta in (0,1)");
    if (mode == CoreMode::NonNegative && beta + eta < 1.0)
      throw ModeUnsupportedError(
          "non-negative thermostat envelope requires beta+eta >= 1");
    KernelFamily f;
    f.variant_ = Variant::Thermostat;
    f.mode_ = mode;
    f.beta_ = beta;
    f.eta_ = eta;
    return f;
  }

  static KernelFamily dirichlet_nonlocal(CoreMode mode = CoreMode::SignChanging) {
    KernelFamily f;
    f.variant_ = Variant::DirichletNonlocal;
    f.mode_ = mode;
    return f;
  }

  static KernelFamily custom(CustomSpec spec,
                             CoreMode mode = CoreMode::SignChanging) {
    KernelFamily f;
    f.variant_ = Variant::Custom;
    f.mode_ = mode;
    f.custom_ = std::move(spec);
    return f;
  }

  Variant variant() const { return variant_; }
  CoreMode mode() const { return mode_; }
  double beta() const { return beta_; }
  double eta() const { return eta_; }

  double k(double t, double s) const {
    if (t < 0.0) return 0.0;
    switch (variant_) {
      case Variant::Thermostat: {
        const double be = beta_ + eta_;
        return beta_ * t / be + t * (eta_ - s) * heaviside(eta_ - s) / be -
               (t - s) * heaviside(t - s);
      }
      case Variant::DirichletNonlocal:
        return t * (1.0 - s) - (t - s) * heaviside(t - s);
      case Variant::Custom:
        return custom_.k(t, s);
    }
    return 0.0;
  }

  double gamma(double t) const {
    if (t < 0.0) return 0.0;
    switch (variant_) {
      case Variant::Thermostat:
        return t / (beta_ + eta_);
      case Variant::DirichletNonlocal:
        return t;
      case Variant::Custom:
        return custom_.gamma(t);
    }
    return 0.0;
  }

  double gamma_sup01() const {
    // gamma is increasing for the built-in families.
    if (variant_ != Variant::Custom) return gamma(1.0);
    double m = 0.0;
    for (int i = 0; i <= 512; ++i)
      m = std::max(m, std::abs(custom_.gamma(i / 512.0)));
    return m;
  }

  // Envelope Phi with |k(t,s)| <= Phi(s) on [0,1]x[0,1].
  std::function<double(double)> phi() const {
    switch (variant_) {
      case Variant::Thermostat: {
        const double be = beta_ + eta_;
        if (mode_ == CoreMode::NonNegative) {
          const double b = beta_, e = eta_;
          return [b, e, be](double s) {
            return s >= e ? b * s / be : s * (1.0 - s / be);
          };
        }
        if (be >= 0.5) return [](double s) { return s; };
        const double slope = (1.0 - be) / be;
        return [slope](double s) { return slope * s; };
      }
      case Variant::DirichletNonlocal:
        return [](double s) { return s * (1.0 - s); };
      case Variant::Custom:
        return custom_.phi;
    }
    return {};
  }

  // Pointwise integrable majorant of |k| used in the sup-norm constant m.
  // For a non-negative kernel this is k itself; for the sign-changing
  // thermostat it is the term-wise bound
  //   beta t/(beta+eta) + t (eta-s) H(eta-s)/(beta+eta) + (t-s) H(t-s),
  // which matches the closed-form constants of the built-in reference cases
  // and is conservative: a larger 1/m only strengthens the index-1 test.
  double abs_majorant(double t, double s) const {
    if (t < 0.0) return 0.0;
    switch (variant_) {
      case Variant::Thermostat: {
        if (mode_ == CoreMode::NonNegative) return k(t, s);
        const double be = beta_ + eta_;
        return beta_ * t / be + t * (eta_ - s) * heaviside(eta_ - s) / be +
               (t - s) * heaviside(t - s);
      }
      case Variant::DirichletNonlocal:
        return k(t, s);  // non-negative
      case Variant::Custom:
        return std::abs(custom_.k(t, s));
    }
    return 0.0;
  }

  // Kink loci of s -> k(t,s) for panel-split quadrature.
  std::vector<double> s_kinks(double t) const {
    switch (variant_) {
      case Variant::Thermostat:
        return {eta_, t};
      case Variant::DirichletNonlocal:
        return {t};
      case Variant::Custom: {
        std::vector<double> v = custom_.s_kinks;
        v.push_back(t);
        return v;
      }
    }
    return {};
  }

  // Kink loci of t -> k(t,s) on [0,1].
  std::vector<double> t_kinks(double s) const {
    if (variant_ == Variant::Thermostat) return {s, eta_};
    return {s};
  }

  // Cone constants for [a,b]. c2 = a for both built-in families; c1 follows
  // the closed-form minimum of k/Phi over [a,b]x[0,1].
  ConeData cone_constants(double a, double b) const {
    if (!(a > 0.0 && a < b))
      throw IntervalInvalidError("0 < a < b required");
    if (b > 1.0) throw IntervalInvalidError("b <= 1 required");
    ConeData cone;
    cone.a = a;
    cone.b = b;
    cone.phi = phi();
    switch (variant_) {
      case Variant::Thermostat: {
        const double be = beta_ + eta_;
        if (mode_ == CoreMode::SignChanging) {
          if (!(b < be))
            throw IntervalInvalidError(
                "b < beta+eta required for the sign-changing thermostat cone");
          const double denom = be >= 0.5 ? be : 1.0 - be;
          cone.c1 = std::min(a * beta_ / denom, (be - b) / denom);
        } else {
          if (!(b < 1.0))
            throw IntervalInvalidError(
                "b < 1 required for the non-negative thermostat cone");
          cone.c1 = std::min(a, 1.0 - b / be);
        }
        cone.c2 = a;
        break;
      }
      case Variant::DirichletNonlocal:
        if (!(b < 1.0))
          throw IntervalInvalidError("b < 1 required for the Dirichlet cone");
        cone.c1 = std::min(a, 1.0 - b);
        cone.c2 = a;
        break;
      case Variant::Custom:
        cone.c1 = custom_.c1(a, b);
        cone.c2 = custom_.c2(a, b);
        break;
    }
    if (!(cone.c1 > 0.0 && cone.c1 <= 1.0))
      throw IntervalInvalidError("derived c1 = " + std::to_string(cone.c1) +
                                 " outside (0,1]");
    if (!(cone.c2 > 0.0 && cone.c2 <= 1.0))
      throw IntervalInvalidError("derived c2 = " + std::to_string(cone.c2) +
                                 " outside (0,1]");
    cone.c = std::min(cone.c1, cone.c2);
    return cone;
  }

 private:
  Variant variant_ = Variant::DirichletNonlocal;
  CoreMode mode_ = CoreMode::SignChanging;
  double beta_ = 0.0;
  double eta_ = 0.0;
  CustomSpec custom_;
};

// Grid scan of the envelope inequalities |k| <= Phi on [0,1]^2 and
// k >= c1 Phi on [a,b]x[0,1]; in non-negative mode additionally k >= 0.
struct BoundsReport {
  bool pass = false;
  double worst_upper_margin = 0.0;  // min of Phi(s) - |k(t,s)|
  double worst_lower_margin = 0.0;  // min of k(t,s) - c1 Phi(s) on [a,b]
  double worst_sign_margin = 0.0;   // min of k(t,s), non-negative mode only
  double tolerance = 1e-12;
};

inline BoundsReport validate_bounds(const KernelFamily& fam,
                                    const ConeData& cone, int grid) {
  BoundsReport rep;
  const auto phi = cone.phi ? cone.phi : fam.phi();
  double upper = std::numeric_limits<double>::infinity();
  double lower = std::numeric_limits<double>::infinity();
  double sign = std::numeric_limits<double>::infinity();
  const int n = std::max(grid, 2);
  for (int i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / (n - 1);
    const double tab = cone.a + (cone.b - cone.a) * i / (n - 1);
    for (int j = 0; j < n; ++j) {
      const double s = static_cast<double>(j) / (n - 1);
      const double kts = fam.k(t, s);
      upper = std::min(upper, phi(s) - std::abs(kts));
      if (fam.mode() == CoreMode::NonNegative) sign = std::min(sign, kts);
      lower = std::min(lower, fam.k(tab, s) - cone.c1 * phi(s));
    }
  }
  rep.worst_upper_margin = upper;
  rep.worst_lower_margin = lower;
  rep.worst_sign_margin = fam.mode() == CoreMode::NonNegative ? sign : 0.0;
  rep.pass = upper >= -rep.tolerance && lower >= -rep.tolerance &&
             rep.worst_sign_margin >= -rep.tolerance;
  return rep;
}

// Residual check that the kernel inverts -u'' = y under the family's
// homogeneous boundary conditions. u(t) = int_0^1 k(t,s) y(s) ds is formed by
// panel-split quadrature; -u'' is approximated by second central differences.
// Stencils that straddle a breakpoint of y are skipped: across a kink of y
// the one-sided third derivatives of u differ and the central difference
// degrades to first order there.
struct GreensReport {
  double interior_residual = 0.0;
  double bc_residual = 0.0;
  bool bc_checked = false;
  int grid = 0;
};

template <class Y>
GreensReport greens_residual(const KernelFamily& fam, const Y& y, int grid,
                             const std::vector<double>& y_breakpoints = {}) {
  GreensReport rep;
  rep.grid = grid;
  const int n = std::max(grid, 5);
  const double h = 1.0 / (n - 1);

  std::vector<double> u(n);
  for (int i = 0; i < n; ++i) {
    const double t = i * h;
    auto kinks = fam.s_kinks(t);
    kinks.insert(kinks.end(), y_breakpoints.begin(), y_breakpoints.end());
    u[i] = quadrature::integrate_panels(
        [&](double s) { return fam.k(t, s) * y(s); }, 0.0, 1.0, kinks, 16);
  }

  double worst = 0.0;
  for (int i = 1; i + 1 < n; ++i) {
    const double t = i * h;
    bool skip = false;
    for (double b : y_breakpoints)
      if (std::abs(b - t) < 1.5 * h) skip = true;
    if (skip) continue;
    const double upp = (u[i + 1] - 2.0 * u[i] + u[i - 1]) / (h * h);
    worst = std::max(worst, std::abs(-upp - y(t)));
  }
  rep.interior_residual = worst;

  switch (fam.variant()) {
    case KernelFamily::Variant::Thermostat: {
      // beta u'(1) + u(eta) = 0 for the alpha-free part; u'(1) is computed
      // from the exact t-derivative of the kernel at t=1.
      const double be = fam.beta() + fam.eta();
      auto kinks = fam.s_kinks(1.0);
      kinks.insert(kinks.end(), y_breakpoints.begin(), y_breakpoints.end());
      const double up1 = quadrature::integrate_panels(
          [&](double s) {
            const double dk = fam.beta() / be +
                              (fam.eta() - s) * heaviside(fam.eta() - s) / be -
                              1.0;
            return dk * y(s);
          },
          0.0, 1.0, kinks, 16);
      auto kinks_eta = fam.s_kinks(fam.eta());
      kinks_eta.insert(kinks_eta.end(), y_breakpoints.begin(),
                       y_breakpoints.end());
      const double u_eta = quadrature::integrate_panels(
          [&](double s) { return fam.k(fam.eta(), s) * y(s); }, 0.0, 1.0,
          kinks_eta, 16);
      rep.bc_residual =
          std::max(std::abs(u.front()), std::abs(fam.beta() * up1 + u_eta));
      rep.bc_checked = true;
      break;
    }
    case KernelFamily::Variant::DirichletNonlocal:
      rep.bc_residual = std::max(std::abs(u.front()), std::abs(u.back()));
      rep.bc_checked = true;
      break;
    case KernelFamily::Variant::Custom:
      rep.bc_checked = false;
      break;
  }
  return rep;
}

}  // namespace fbvp
