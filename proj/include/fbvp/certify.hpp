#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "fbvp/envelope.hpp"
#include "fbvp/errors.hpp"
#include "fbvp/measure.hpp"
#include "fbvp/problem.hpp"
#include "fbvp/quadrature.hpp"

namespace fbvp {

// ---------------------------------------------------------------------------
// Hypothesis validation
// ---------------------------------------------------------------------------

struct HypothesisCheck {
  std::string id;     // "C1" .. "C8"
  bool pass = false;
  bool hard = true;   // hard failures block certification
  double value = 0.0;
  std::string note;
};

struct HypothesesReport {
  std::vector<HypothesisCheck> checks;

  bool all_pass() const {
    for (const auto& c : checks)
      if (c.hard && !c.pass) return false;
    return true;
  }

  const HypothesisCheck* first_hard_failure() const {
    for (const auto& c : checks)
      if (c.hard && !c.pass) return &c;
    return nullptr;
  }

  const HypothesisCheck* find(const std::string& id) const {
    for (const auto& c : checks)
      if (c.id == id) return &c;
    return nullptr;
  }
};

inline HypothesesReport validate_hypotheses(const ProblemInstance& P) {
  HypothesesReport rep;
  const ConeData& cone = P.cone;

  // C1: psi continuous on [-r,0], zero extension on [0,1]. The extension is
  // continuous at 0 only when psi(0)=0; a nonzero value is reported as a
  // warning rather than a failure.
  {
    HypothesisCheck c{"C1", true, false, std::abs(P.psi_at_zero()), ""};
    if (c.value > 0.0)
      c.note = "psi(0) != 0: zero extension is discontinuous at t=0";
    if (P.mode == CoreMode::NonNegative && P.psi.min_value() < 0.0) {
      c.pass = false;
      c.hard = true;
      c.note = "non-negative mode requires psi >= 0";
      c.value = P.psi.min_value();
    }
    rep.checks.push_back(c);
  }

  // C2: k vanishes on [-r,0]. Structural for built-ins (guarded evaluation);
  // sampled for custom kernels.
  {
    HypothesisCheck c{"C2", true, true, 0.0, "k(t,s)=0 for t<=0"};
    if (P.kernel.variant() == KernelFamily::Variant::Custom) {
      double worst = 0.0;
      for (int i = 0; i <= 32; ++i)
        for (int j = 0; j <= 32; ++j)
          worst = std::max(worst, std::abs(P.kernel.k(-P.r * i / 32.0, j / 32.0)));
      c.value = worst;
      c.pass = worst <= 1e-12;
    }
    rep.checks.push_back(c);
  }

  // C3 (C'3 in non-negative mode): kernel envelope bounds.
  {
    const BoundsReport b = validate_bounds(P.kernel, cone, 257);
    HypothesisCheck c{"C3", b.pass, true,
                      std::min(b.worst_upper_margin, b.worst_lower_margin),
                      "worst margin of |k|<=Phi and k>=c1*Phi"};
    if (P.mode == CoreMode::NonNegative)
      c.value = std::min(c.value, b.worst_sign_margin);
    rep.checks.push_back(c);
  }

  // C4: g >= 0 and int_a^b Phi g > 0.
  {
    HypothesisCheck c{"C4", false, true, 0.0, ""};
    const bool g_nonneg = P.g.min_value() >= 0.0;
    std::vector<double> brk = P.g.breakpoints();
    if (P.kernel.variant() == KernelFamily::Variant::Thermostat)
      brk.push_back(P.kernel.eta());
    const auto phi = cone.phi;
    const double mass = quadrature::integrate_adaptive(
        [&](double s) { return phi(s) * P.g(s); }, cone.a, cone.b, brk, 1e-11);
    c.value = mass;
    c.pass = g_nonneg && mass > 0.0;
    c.note = g_nonneg ? "int_a^b Phi g" : "g takes negative values";
    rep.checks.push_back(c);
  }

  // C5: non-negativity of F at sampled arguments. Measurability and the
  // L^inf domination are assumed, not checked.
  {
    HypothesisCheck c{"C5", true, true, 0.0, "spot-checked F >= 0"};
    const double lo = P.mode == CoreMode::NonNegative ? 0.0 : -2.0;
    if (P.F.form == Nonlinearity::Form::Delay) {
      for (int i = 0; i <= 8 && c.pass; ++i)
        for (int j = 0; j <= 8 && c.pass; ++j)
          for (int k = 0; k <= 8 && c.pass; ++k) {
            const double val =
                P.F.f(i / 8.0, lo + (2.0 - lo) * j / 8.0, lo + (2.0 - lo) * k / 8.0);
            if (val < 0.0) {
              c.pass = false;
              c.value = val;
              c.note = "f sampled negative";
            }
          }
    }
    rep.checks.push_back(c);
  }

  // C6: bounded variation (exact for this representation) and K_A >= 0.
  {
    HypothesisCheck c{"C6", true, true, 0.0, ""};
    c.value = total_variation(P.alpha);
    if (!P.alpha.is_zero()) {
      const auto ka = kernel_moment(P.alpha, P.kernel);
      const PositivityReport pos = check_positivity(ka, 4097);
      c.pass = pos.nonnegative;
      c.note = "Var(A)=" + std::to_string(c.value) +
               ", min K_A ~ " + std::to_string(pos.worst_value) + " at s=" +
               std::to_string(pos.worst_point);
    } else {
      c.note = "alpha = 0";
    }
    rep.checks.push_back(c);
  }

  // C7 (C'7): gamma vanishing on [-r,0], not identically zero,
  // alpha[gamma] in [0,1), gamma >= c2 ||gamma|| on [a,b].
  {
    HypothesisCheck c{"C7", true, true, 0.0, ""};
    const double gnorm = P.kernel.gamma_sup01();
    const double ag = P.alpha_gamma();
    c.value = ag;
    double margin = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 256; ++i) {
      const double t = cone.a + (cone.b - cone.a) * i / 256.0;
      margin = std::min(margin, P.kernel.gamma(t) - cone.c2 * gnorm);
    }
    if (!(gnorm > 0.0)) {
      c.pass = false;
      c.note = "gamma is identically zero on [0,1]";
    } else if (ag < 0.0 || ag >= 1.0) {
      c.pass = false;
      c.note = "alpha[gamma] outside [0,1)";
    } else if (margin < -1e-12) {
      c.pass = false;
      c.note = "gamma < c2 ||gamma|| on [a,b], margin " + std::to_string(margin);
    } else if (P.mode == CoreMode::NonNegative) {
      double gmin = 0.0;
      for (int i = 0; i <= 256; ++i)
        gmin = std::min(gmin, P.kernel.gamma(i / 256.0));
      if (gmin < -1e-12) {
        c.pass = false;
        c.note = "gamma takes negative values in non-negative mode";
      }
    }
    rep.checks.push_back(c);
  }

  // C8: r < b - a.
  {
    HypothesisCheck c{"C8", P.r < cone.b - cone.a, true, cone.b - cone.a - P.r,
                      "b - a - r"};
    rep.checks.push_back(c);
  }

  return rep;
}

// ---------------------------------------------------------------------------
// The constants m and M(a,b)
// ---------------------------------------------------------------------------

struct ExtremalConstant {
  double value = 0.0;       // m or M(a,b)
  double reciprocal = 0.0;  // the extremal bracket value
  double arg_t = 0.0;
  bool degenerate = false;  // reciprocal vanished; value is +inf
};

namespace detail {

// Golden-section refinement; returns the best (x, f(x)) found. Works on the
// bracket between two grid neighbors of the discrete extremum, where the
// piecewise-smooth objective is effectively unimodal.
template <class F>
void golden_refine(const F& f, double lo, double hi, bool maximize,
                   double tol, double& best_x, double& best_v) {
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  auto better = [maximize](double p, double q) {
    return maximize ? p > q : p < q;
  };
  auto track = [&](double x, double v) {
    if (better(v, best_v)) {
      best_v = v;
      best_x = x;
    }
  };
  track(x1, f1);
  track(x2, f2);
  for (int it = 0; it < 200 && (b - a) > tol; ++it) {
    if (better(f1, f2)) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = f(x1);
      track(x1, f1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = f(x2);
      track(x2, f2);
    }
  }
}

template <class F>
ExtremalConstant extremal_bracket(const F& bracket, double t_lo, double t_hi,
                                  bool maximize, double tol, int t_grid) {
  const int n = std::max(t_grid, 3);
  double best_v = maximize ? -std::numeric_limits<double>::infinity()
                           : std::numeric_limits<double>::infinity();
  double best_x = t_lo;
  int best_i = 0;
  for (int i = 0; i < n; ++i) {
    const double t = t_lo + (t_hi - t_lo) * i / (n - 1);
    const double v = bracket(t);
    if (maximize ? v > best_v : v < best_v) {
      best_v = v;
      best_x = t;
      best_i = i;
    }
  }
  const double h = (t_hi - t_lo) / (n - 1);
  const double lo = std::max(t_lo, best_x - h), hi = std::min(t_hi, best_x + h);
  (void)best_i;
  golden_refine(bracket, lo, hi, maximize, tol, best_x, best_v);

  ExtremalConstant out;
  out.reciprocal = best_v;
  out.arg_t = best_x;
  if (best_v > 0.0 && std::isfinite(best_v)) {
    out.value = 1.0 / best_v;
  } else {
    out.value = std::numeric_limits<double>::infinity();
    out.degenerate = true;
  }
  return out;
}

// int K_A(s) g(s) ds over [lo,hi], 0 for the zero measure.
inline double moment_weight_integral(const ProblemInstance& P, double lo,
                                     double hi) {
  if (P.alpha.is_zero()) return 0.0;
  const auto ka = kernel_moment(P.alpha, P.kernel);
  std::vector<double> brk = P.g.breakpoints();
  const auto mb = P.alpha.breakpoints();
  brk.insert(brk.end(), mb.begin(), mb.end());
  if (P.kernel.variant() == KernelFamily::Variant::Thermostat)
    brk.push_back(P.kernel.eta());
  return quadrature::integrate_adaptive(
      [&](double s) { return ka(s) * P.g(s); }, lo, hi, brk, 1e-11);
}

}  // namespace detail

// 1/m = sup_{t in [0,1]} { int_0^1 |k(t,s)| g(s) ds
//                          + |gamma(t)|/(1-alpha[gamma]) int_0^1 K_A g ds },
// with |k| realized by the family's integrable majorant (see
// KernelFamily::abs_majorant). Throws if alpha[gamma] >= 1.
inline ExtremalConstant compute_m(const ProblemInstance& P, double tol = 1e-10,
                                  int t_grid = 2049) {
  const double ag = P.alpha_gamma();
  if (ag >= 1.0) throw AlphaGammaInvalidError(ag);
  const double moment = detail::moment_weight_integral(P, 0.0, 1.0);
  const auto bracket = [&](double t) {
    std::vector<double> brk = P.kernel.s_kinks(t);
    const auto gb = P.g.breakpoints();
    brk.insert(brk.end(), gb.begin(), gb.end());
    const double ker = quadrature::integrate_panels(
        [&](double s) { return P.kernel.abs_majorant(t, s) * P.g(s); }, 0.0,
        1.0, brk, 16);
    return ker + std::abs(P.kernel.gamma(t)) * moment / (1.0 - ag);
  };
  return detail::extremal_bracket(bracket, 0.0, 1.0, true, tol, t_grid);
}

// 1/M(a,b) = inf_{t in [a,b]} { int_{a+r}^{b} k(t,s) g(s) ds
//                + gamma(t)/(1-alpha[gamma]) int_{a+r}^{b} K_A g ds }.
// Throws if r >= b-a (the inner integration interval would be empty).
inline ExtremalConstant compute_M(const ProblemInstance& P, double tol = 1e-10,
                                  int t_grid = 2049) {
  const ConeData& cone = P.cone;
  if (!(P.r < cone.b - cone.a))
    throw DelayTooLargeError(P.r, cone.a, cone.b);
  const double ag = P.alpha_gamma();
  if (ag >= 1.0) throw AlphaGammaInvalidError(ag);
  const double s_lo = cone.a + P.r, s_hi = cone.b;
  const double moment = detail::moment_weight_integral(P, s_lo, s_hi);
  const auto bracket = [&](double t) {
    std::vector<double> brk = P.kernel.s_kinks(t);
    const auto gb = P.g.breakpoints();
    brk.insert(brk.end(), gb.begin(), gb.end());
    const double ker = quadrature::integrate_panels(
        [&](double s) { return P.kernel.k(t, s) * P.g(s); }, s_lo, s_hi, brk,
        16);
    return ker + P.kernel.gamma(t) * moment / (1.0 - ag);
  };
  return detail::extremal_bracket(bracket, cone.a, cone.b, false, tol, t_grid);
}

// ---------------------------------------------------------------------------
// Index conditions
// ---------------------------------------------------------------------------

struct IndexCheck {
  bool holds = false;
  double margin = 0.0;        // 1 - sup/m, resp. inf/M - 1
  double growth_number = 0.0; // the sup or inf number at this rho
  double threshold = 0.0;     // m, resp. M(a,b)
  bool degenerate = false;    // threshold constant was degenerate
};

namespace detail {

inline IndexCheck index1_from(const ProblemInstance& P, double rho,
                              const ExtremalConstant& m) {
  const double lower = P.mode == CoreMode::NonNegative ? 0.0 : -rho;
  IndexCheck c;
  c.growth_number = sup_number(P.F, rho, lower);
  c.threshold = m.value;
  c.degenerate = m.degenerate;
  if (m.degenerate) {
    // Vacuous: the bracket vanished, so any bounded F passes. Reported, not
    // silently inverted.
    c.holds = true;
    c.margin = 1.0;
  } else {
    const double ratio = c.growth_number * m.reciprocal;
    c.holds = ratio < 1.0;
    c.margin = 1.0 - ratio;
  }
  return c;
}

inline IndexCheck index0_from(const ProblemInstance& P, double rho,
                              const ExtremalConstant& M) {
  IndexCheck c;
  c.growth_number =
      inf_number(P.F, rho, P.cone.c, P.cone.a, P.cone.b);
  c.threshold = M.value;
  c.degenerate = M.degenerate;
  if (M.degenerate) {
    c.holds = false;
    c.margin = -1.0;
  } else {
    const double ratio = c.growth_number * M.reciprocal;
    c.holds = ratio > 1.0;
    c.margin = ratio - 1.0;
  }
  return c;
}

}  // namespace detail

// Index-1 condition at level rho: F^(lower,rho) / m < 1, rho > ||psi||.
inline IndexCheck check_index1(const ProblemInstance& P, double rho) {
  const double pn = P.psi_norm();
  if (!(rho > pn)) throw RhoTooSmallError(rho, pn);
  return detail::index1_from(P, rho, compute_m(P));
}

// Index-0 condition at level rho: F_(rho,rho/c) / M(a,b) > 1.
inline IndexCheck check_index0(const ProblemInstance& P, double rho) {
  if (!(rho > 0.0)) throw RhoNonpositiveError(rho);
  return detail::index0_from(P, rho, compute_M(P));
}

// ---------------------------------------------------------------------------
// Certificates
// ---------------------------------------------------------------------------

enum class RungKind { Index1, Index0 };

struct Rung {
  double rho = 0.0;
  RungKind kind = RungKind::Index1;
  double margin = 0.0;
};

enum class Pattern { None, S1, S2, S3, S4, S5, S6 };

inline const char* pattern_name(Pattern p) {
  switch (p) {
    case Pattern::S1: return "S1";
    case Pattern::S2: return "S2";
    case Pattern::S3: return "S3";
    case Pattern::S4: return "S4";
    case Pattern::S5: return "S5";
    case Pattern::S6: return "S6";
    default: return "none";
  }
}

inline int pattern_solutions(Pattern p) {
  switch (p) {
    case Pattern::S1:
    case Pattern::S2: return 1;
    case Pattern::S3:
    case Pattern::S4: return 2;
    case Pattern::S5:
    case Pattern::S6: return 3;
    default: return 0;
  }
}

// Full probe record at one candidate rho.
struct RungProbe {
  double rho = 0.0;
  bool index1_checked = false;
  IndexCheck index1;
  IndexCheck index0;
};

struct Certificate {
  Pattern pattern = Pattern::None;
  int guaranteed_solutions = 0;
  std::vector<Rung> ladder;      // the rungs realizing the pattern
  CoreMode mode = CoreMode::SignChanging;
  bool advisory_same_norm = false;  // S1/S3/S5: one solution may share ||psi||
  std::vector<RungProbe> probes;    // every evaluated candidate
  double m = std::numeric_limits<double>::quiet_NaN();
  double big_m = std::numeric_limits<double>::quiet_NaN();
  double psi_norm = 0.0;
  double c = 0.0;
  HypothesesReport hypotheses;
};

// Matches a ladder of validated rungs against the admissible gap patterns.
// All inequalities are strict and compared exactly; margins are the user's
// robustness information. Higher solution counts win; the two-sided scan
// order inside one count follows the enumeration of the patterns.
inline Certificate match_pattern(const ProblemInstance& P,
                                 std::vector<Rung> rungs) {
  std::sort(rungs.begin(), rungs.end(),
            [](const Rung& x, const Rung& y) { return x.rho < y.rho; });
  const double pn = P.psi_norm();
  const double c = P.cone.c;
  const auto is1 = [&](const Rung& r) { return r.kind == RungKind::Index1; };
  const auto is0 = [&](const Rung& r) { return r.kind == RungKind::Index0; };
  const std::size_t n = rungs.size();

  Certificate cert;
  cert.mode = P.mode;
  cert.psi_norm = pn;
  cert.c = c;

  auto emit = [&](Pattern p, std::initializer_list<std::size_t> idx) {
    cert.pattern = p;
    cert.guaranteed_solutions = pattern_solutions(p);
    cert.advisory_same_norm =
        p == Pattern::S1 || p == Pattern::S3 || p == Pattern::S5;
    cert.ladder.clear();
    for (std::size_t i : idx) cert.ladder.push_back(rungs[i]);
  };

  // S5: 0-1-0-1 with ||psi|| < rho2, rho1/c < rho2 < rho3, rho3/c < rho4.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t k = j + 1; k < n; ++k)
        for (std::size_t l = k + 1; l < n; ++l)
          if (is0(rungs[i]) && is1(rungs[j]) && is0(rungs[k]) &&
              is1(rungs[l]) && pn < rungs[j].rho &&
              rungs[i].rho / c < rungs[j].rho && rungs[j].rho < rungs[k].rho &&
              rungs[k].rho / c < rungs[l].rho) {
            emit(Pattern::S5, {i, j, k, l});
            return cert;
          }
  // S6: 1-0-1-0 with ||psi|| < rho1 < rho2, rho2/c < rho3 < rho4.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t k = j + 1; k < n; ++k)
        for (std::size_t l = k + 1; l < n; ++l)
          if (is1(rungs[i]) && is0(rungs[j]) && is1(rungs[k]) &&
              is0(rungs[l]) && pn < rungs[i].rho &&
              rungs[i].rho < rungs[j].rho && rungs[j].rho / c < rungs[k].rho &&
              rungs[k].rho < rungs[l].rho) {
            emit(Pattern::S6, {i, j, k, l});
            return cert;
          }
  // S3: 0-1-0 with ||psi|| < rho2, rho1/c < rho2 < rho3.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t k = j + 1; k < n; ++k)
        if (is0(rungs[i]) && is1(rungs[j]) && is0(rungs[k]) &&
            pn < rungs[j].rho && rungs[i].rho / c < rungs[j].rho &&
            rungs[j].rho < rungs[k].rho) {
          emit(Pattern::S3, {i, j, k});
          return cert;
        }
  // S4: 1-0-1 with ||psi|| < rho1 < rho2, rho2/c < rho3.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t k = j + 1; k < n; ++k)
        if (is1(rungs[i]) && is0(rungs[j]) && is1(rungs[k]) &&
            pn < rungs[i].rho && rungs[i].rho < rungs[j].rho &&
            rungs[j].rho / c < rungs[k].rho) {
          emit(Pattern::S4, {i, j, k});
          return cert;
        }
  // S1: 0 then 1 with ||psi|| < rho2 and rho1/c < rho2.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (is0(rungs[i]) && is1(rungs[j]) && pn < rungs[j].rho &&
          rungs[i].rho / c < rungs[j].rho) {
        emit(Pattern::S1, {i, j});
        return cert;
      }
  // S2: 1 then 0 with ||psi|| < rho1 < rho2.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (is1(rungs[i]) && is0(rungs[j]) && pn < rungs[i].rho &&
          rungs[i].rho < rungs[j].rho) {
        emit(Pattern::S2, {i, j});
        return cert;
      }
  return cert;
}

namespace detail {

// Evaluates both index conditions at each candidate rho and assembles the
// deepest certificate the validated rungs admit.
inline Certificate probe_and_match(const ProblemInstance& P,
                                   const std::vector<double>& candidates) {
  const ExtremalConstant m = compute_m(P);
  const ExtremalConstant M = compute_M(P);
  const double pn = P.psi_norm();

  Certificate cert;
  std::vector<Rung> rungs;
  for (double rho : candidates) {
    if (!(rho > 0.0)) continue;
    RungProbe probe;
    probe.rho = rho;
    if (rho > pn) {
      probe.index1 = index1_from(P, rho, m);
      probe.index1_checked = true;
    }
    probe.index0 = index0_from(P, rho, M);
    if (probe.index1_checked && probe.index1.holds)
      rungs.push_back({rho, RungKind::Index1, probe.index1.margin});
    else if (probe.index0.holds)
      rungs.push_back({rho, RungKind::Index0, probe.index0.margin});
    cert.probes.push_back(probe);
  }

  Certificate matched = match_pattern(P, rungs);
  matched.probes = std::move(cert.probes);
  matched.m = m.value;
  matched.big_m = M.value;
  return matched;
}

}  // namespace detail

// Scans log-spaced candidates rho in (||psi||, rho_max] and returns the
// deepest certificate found. The search is plain plumbing: the theory only
// asserts that suitable levels exist, it does not construct them.
inline Certificate auto_ladder(const ProblemInstance& P, double rho_max,
                               int budget) {
  budget = std::max(budget, 2);
  const double pn = P.psi_norm();
  const double lo = pn > 0.0 ? pn * 1.000001 + 1e-12 : rho_max * 1e-6;
  std::vector<double> candidates;
  if (lo < rho_max) {
    for (int i = 0; i < budget; ++i) {
      const double w = static_cast<double>(i) / (budget - 1);
      candidates.push_back(lo * std::pow(rho_max / lo, w));
    }
  }
  return detail::probe_and_match(P, candidates);
}

struct CertifyOptions {
  std::vector<double> ladder;  // user-pinned candidate levels; empty = auto
  double rho_max = 1e4;
  int budget = 24;
};

// User-ladder certification when levels are pinned, auto search otherwise.
inline Certificate certify_instance(const ProblemInstance& P,
                                    const CertifyOptions& opt) {
  if (!opt.ladder.empty()) return detail::probe_and_match(P, opt.ladder);
  return auto_ladder(P, opt.rho_max, opt.budget);
}

}  // namespace fbvp
