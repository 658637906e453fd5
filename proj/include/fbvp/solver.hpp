#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fbvp/envelope.hpp"
#include "fbvp/errors.hpp"
#include "fbvp/grid_function.hpp"
#include "fbvp/measure.hpp"
#include "fbvp/problem.hpp"
#include "fbvp/quadrature.hpp"

namespace fbvp {

// ---------------------------------------------------------------------------
// Discretization
// ---------------------------------------------------------------------------

struct SolverConfig {
  enum class Strategy { Picard, NewtonOnDiscretization, PicardThenNewton };
  enum class Seed { TrivialExtension, ConeSeed, Custom };

  int grid_points = 257;        // nodes on [-r, 1]
  double relaxation = 1.0;      // Picard damping in (0,1]
  int max_iterations = 200;
  double tolerance = 1e-10;     // sup-norm residual target
  Strategy strategy = Strategy::PicardThenNewton;
  Seed seed = Seed::TrivialExtension;
  double seed_level = 1.0;      // ||v|| of the cone seed
  std::optional<GridFunction> custom_seed;
  double cone_slack = 1e-8;     // slack for the reported membership verdict

  void validate() const {
    if (grid_points < 33) throw ConfigError("solver grid needs >= 33 nodes");
    if (!(tolerance > 0.0)) throw ConfigError("solver tolerance must be > 0");
    if (!(relaxation > 0.0 && relaxation <= 1.0))
      throw ConfigError("relaxation must lie in (0,1]");
  }
};

// psi on [-r,0] extended by zero: the trivial element of the affine cone.
inline GridFunction trivial_extension(const ProblemInstance& P, int n) {
  return GridFunction::sample(-P.r, 1.0, static_cast<std::size_t>(n),
                              [&](double t) { return P.psi_extended(t); });
}

// psi extension plus level * gamma/||gamma||: a cone element of norm `level`.
inline GridFunction cone_seed(const ProblemInstance& P, int n, double level) {
  const double gn = P.kernel.gamma_sup01();
  return GridFunction::sample(
      -P.r, 1.0, static_cast<std::size_t>(n), [&](double t) {
        return P.psi_extended(t) + level * P.kernel.gamma(t) / gn;
      });
}

namespace detail {

// Fixed quadrature rule for the s-integral of the operator: panel edges at
// every grid node in [0,1] plus the kernel/measure/weight breakpoints, 4
// Gauss points per panel. Node-aligned panels keep the kernel kink s=t on
// panel boundaries whenever t is an output node.
struct OperatorRule {
  std::vector<double> s;   // quadrature nodes
  std::vector<double> wg;  // weight * g(s)
};

inline OperatorRule make_operator_rule(const ProblemInstance& P,
                                       const GridFunction& u) {
  std::vector<double> edges;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double t = u.node(i);
    if (t > 0.0 && t < 1.0) edges.push_back(t);
  }
  if (P.kernel.variant() == KernelFamily::Variant::Thermostat)
    edges.push_back(P.kernel.eta());
  const auto mb = P.alpha.breakpoints();
  edges.insert(edges.end(), mb.begin(), mb.end());
  const auto gb = P.g.breakpoints();
  edges.insert(edges.end(), gb.begin(), gb.end());

  const auto panels = quadrature::panel_edges(0.0, 1.0, edges);
  const auto& rule = quadrature::cached_rule(4);
  OperatorRule out;
  out.s.reserve(4 * (panels.size() - 1));
  out.wg.reserve(4 * (panels.size() - 1));
  for (std::size_t p = 0; p + 1 < panels.size(); ++p) {
    const double mid = 0.5 * (panels[p] + panels[p + 1]);
    const double hw = 0.5 * (panels[p + 1] - panels[p]);
    for (int q = 0; q < 4; ++q) {
      const double sq = mid + hw * rule.nodes[q];
      out.s.push_back(sq);
      out.wg.push_back(hw * rule.weights[q] * P.g(sq));
    }
  }
  return out;
}

inline double alpha_of_grid(const ProblemInstance& P, const GridFunction& u) {
  if (P.alpha.is_zero()) return 0.0;
  std::vector<double> nodes;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double t = u.node(i);
    if (t > 0.0 && t < 1.0) nodes.push_back(t);
  }
  return apply(P.alpha, [&](double s) { return u.eval(s); }, nodes);
}

}  // namespace detail

// One application of the integral operator on the grid of u:
//   (Fu)(t) = psi_ext(t) + int_0^1 k(t,s) g(s) F(s, u_s) ds + gamma(t) alpha[u].
inline GridFunction apply_operator(const ProblemInstance& P,
                                   const GridFunction& u) {
  const detail::OperatorRule rule = detail::make_operator_rule(P, u);
  const std::size_t nq = rule.s.size();

  std::vector<double> coef(nq);
  for (std::size_t q = 0; q < nq; ++q) {
    const HistorySegment seg(u, rule.s[q], P.r);
    coef[q] = rule.wg[q] * evaluate(P.F, rule.s[q], seg);
  }
  const double au = detail::alpha_of_grid(P, u);

  std::vector<double> out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double t = u.node(i);
    if (t < 0.0) {
      out[i] = P.psi(t);
      continue;
    }
    double acc = 0.0;
    for (std::size_t q = 0; q < nq; ++q) acc += P.kernel.k(t, rule.s[q]) * coef[q];
    out[i] = acc + P.kernel.gamma(t) * au;
  }
  return GridFunction(u.lo(), u.hi(), std::move(out));
}

// |alpha[u](1 - alpha[gamma]) - int_0^1 K_A(s) g(s) F(s,u_s) ds|: vanishes at
// any true fixed point, so it is a consistency diagnostic for computed
// solutions. Exactly zero when alpha is the zero measure.
inline double alpha_consistency(const ProblemInstance& P,
                                const GridFunction& u) {
  if (P.alpha.is_zero()) return 0.0;
  const double ag = P.alpha_gamma();
  const double lhs = detail::alpha_of_grid(P, u) * (1.0 - ag);
  const auto ka = kernel_moment(P.alpha, P.kernel);
  const detail::OperatorRule rule = detail::make_operator_rule(P, u);
  double rhs = 0.0;
  for (std::size_t q = 0; q < rule.s.size(); ++q) {
    const HistorySegment seg(u, rule.s[q], P.r);
    rhs += rule.wg[q] * ka(rule.s[q]) * evaluate(P.F, rule.s[q], seg);
  }
  return std::abs(lhs - rhs);
}

// ---------------------------------------------------------------------------
// Cone membership
// ---------------------------------------------------------------------------

struct ConeMembership {
  enum class Verdict { InKpsi, InPositiveCone, Outside };
  Verdict verdict = Verdict::Outside;
  double history_max_abs = 0.0;  // max |v| on [-r,0]; must be exactly 0
  double min_margin = 0.0;       // min_[a,b] v - c ||v||
  double alpha_value = 0.0;      // alpha[v]
  double positivity_min = 0.0;   // min v (non-negative mode only)
  std::string violated_clause;

  bool in_cone() const { return verdict != Verdict::Outside; }
};

// Checks u = psi + v against the cone clauses: v = 0 on the history nodes
// (grid-exact), min_[a,b] v >= c ||v|| - slack and alpha[v] >= -slack; the
// positive cone additionally requires v >= -slack everywhere.
inline ConeMembership check_cone_membership(const ProblemInstance& P,
                                            const GridFunction& u,
                                            double slack) {
  ConeMembership m;
  std::vector<double> v(u.size());
  double history = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double t = u.node(i);
    v[i] = u.value(i) - P.psi_extended(t);
    if (t <= 0.0) history = std::max(history, std::abs(v[i]));
  }
  m.history_max_abs = history;
  const GridFunction vg(u.lo(), u.hi(), std::move(v));

  const double norm_v = vg.sup_norm(u.lo(), u.hi());
  const double min_ab = vg.min_on(P.cone.a, P.cone.b);
  m.min_margin = min_ab - P.cone.c * norm_v;

  std::vector<double> nodes;
  for (std::size_t i = 0; i < u.size(); ++i)
    if (u.node(i) > 0.0 && u.node(i) < 1.0) nodes.push_back(u.node(i));
  m.alpha_value =
      apply(P.alpha, [&](double s) { return vg.eval(s); }, nodes);
  m.positivity_min = vg.min_on(u.lo(), u.hi());

  if (history != 0.0) {
    m.violated_clause = "v != 0 on [-r,0]";
    return m;
  }
  if (m.min_margin < -slack) {
    m.violated_clause = "min over [a,b] below c ||v||";
    return m;
  }
  if (m.alpha_value < -slack) {
    m.violated_clause = "alpha[v] < 0";
    return m;
  }
  if (P.mode == CoreMode::NonNegative) {
    if (m.positivity_min < -slack) {
      m.violated_clause = "v takes negative values";
      return m;
    }
    m.verdict = ConeMembership::Verdict::InPositiveCone;
    return m;
  }
  m.verdict = ConeMembership::Verdict::InKpsi;
  return m;
}

// ---------------------------------------------------------------------------
// Fixed-point solve
// ---------------------------------------------------------------------------

struct SolutionReport {
  GridFunction u;
  double residual = std::numeric_limits<double>::infinity();
  int iterations = 0;
  ConeMembership membership;
  double psi_norm = 0.0;
  double v_norm = 0.0;  // ||u - psi_ext|| on [0,1]
  bool trivial = false;
  bool converged = false;
  std::string strategy_used;
};

class NoConvergenceError : public Error {
 public:
  explicit NoConvergenceError(SolutionReport best)
      : Error("no convergence: best residual " +
              std::to_string(best.residual) + " after " +
              std::to_string(best.iterations) + " iterations"),
        best_(std::move(best)) {}

  const SolutionReport& best() const { return best_; }

 private:
  SolutionReport best_;
};

namespace detail {

inline double residual_norm(const GridFunction& u, const GridFunction& fu) {
  double r = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i)
    r = std::max(r, std::abs(u.value(i) - fu.value(i)));
  return r;
}

// Dense Jacobian of the discrete residual R(u) = u - Fu. For the delay form
// F(s,u_s) = f(s, u(s), u(s-r)) the derivative taps only the interpolation
// weights of s and s-r, so the matrix is assembled from forward differences
// of f at the quadrature nodes. Other forms fall back to column-wise
// differencing of the full operator.
inline Eigen::MatrixXd residual_jacobian(const ProblemInstance& P,
                                         const GridFunction& u,
                                         const GridFunction& fu) {
  const int n = static_cast<int>(u.size());
  Eigen::MatrixXd J = Eigen::MatrixXd::Identity(n, n);
  const double lo = u.lo();
  const double h = u.step();
  const double unorm = u.sup_norm(u.lo(), u.hi());
  const double delta = std::sqrt(std::numeric_limits<double>::epsilon()) *
                       (1.0 + unorm);

  if (P.F.form != Nonlinearity::Form::Delay) {
    for (int j = 0; j < n; ++j) {
      if (u.node(j) <= 0.0) continue;  // pinned history
      std::vector<double> pert = u.values();
      pert[j] += delta;
      const GridFunction up(u.lo(), u.hi(), std::move(pert));
      const GridFunction fup = apply_operator(P, up);
      for (int i = 0; i < n; ++i)
        J(i, j) -= (fup.value(i) - fu.value(i)) / delta;
    }
    return J;
  }

  const OperatorRule rule = make_operator_rule(P, u);
  const std::size_t nq = rule.s.size();

  struct Tap {
    int j;
    double w;
  };
  auto taps_of = [&](double x, Tap out[2]) -> int {
    if (x <= u.lo() || x >= u.hi()) {
      // Clamped evaluation taps a single node.
      const int j = x <= u.lo() ? 0 : n - 1;
      out[0] = {j, 1.0};
      return 1;
    }
    const double pos = (x - lo) / h;
    int j = std::min(static_cast<int>(pos), n - 2);
    const double w = pos - j;
    out[0] = {j, 1.0 - w};
    out[1] = {j + 1, w};
    return 2;
  };

  // Accumulate the kernel part: dF/du_j = sum_q w_q g_q k(t_i, s_q) *
  // (f_u phi_j(s_q) + f_v phi_j(s_q - r)).
  for (std::size_t q = 0; q < nq; ++q) {
    const double sq = rule.s[q];
    const HistorySegment seg(u, sq, P.r);
    const double uq = seg(0.0), vq = seg(-P.r);
    const double f0 = P.F.f(sq, uq, vq);
    const double fu_q = (P.F.f(sq, uq + delta, vq) - f0) / delta;
    const double fv_q = (P.F.f(sq, uq, vq + delta) - f0) / delta;

    Tap taps[4];
    int nt = taps_of(sq, taps);
    for (int a = 0; a < nt; ++a) taps[a].w *= fu_q;
    Tap vtaps[2];
    const int nv = taps_of(sq - P.r, vtaps);
    for (int a = 0; a < nv; ++a) {
      taps[nt] = {vtaps[a].j, vtaps[a].w * fv_q};
      ++nt;
    }

    for (int i = 0; i < n; ++i) {
      const double t = u.node(i);
      if (t <= 0.0) continue;
      const double kv = P.kernel.k(t, sq) * rule.wg[q];
      if (kv == 0.0) continue;
      for (int a = 0; a < nt; ++a) J(i, taps[a].j) -= kv * taps[a].w;
    }
  }

  // The nonlocal term gamma(t_i) * alpha[hat_j] is a rank-one update.
  if (!P.alpha.is_zero()) {
    Eigen::VectorXd ahat = Eigen::VectorXd::Zero(n);
    for (int j = 0; j < n; ++j) {
      const double tj = u.node(j);
      if (tj + h <= 0.0) continue;  // hat support misses [0,1]
      const double tl = tj - h, tr = tj + h;
      ahat(j) = apply(
          P.alpha,
          [&](double x) {
            if (x <= tl || x >= tr) return 0.0;
            return 1.0 - std::abs(x - tj) / h;
          },
          {tl, tj, tr});
    }
    for (int i = 0; i < n; ++i) {
      const double t = u.node(i);
      if (t <= 0.0) continue;
      const double gi = P.kernel.gamma(t);
      if (gi == 0.0) continue;
      for (int j = 0; j < n; ++j)
        if (ahat(j) != 0.0) J(i, j) -= gi * ahat(j);
    }
  }
  return J;
}

struct IterationState {
  GridFunction u;
  GridFunction fu;
  double residual = std::numeric_limits<double>::infinity();
  int iterations = 0;
};

inline void track_best(IterationState& best, const GridFunction& u,
                       const GridFunction& fu, double res, int it) {
  if (res < best.residual) {
    best.u = u;
    best.fu = fu;
    best.residual = res;
    best.iterations = it;
  }
}

inline bool picard_phase(const ProblemInstance& P, const SolverConfig& cfg,
                         GridFunction& u, int iter_budget, int& used,
                         IterationState& best) {
  const double omega = cfg.relaxation;
  for (int it = 0; it < iter_budget; ++it) {
    const GridFunction fu = apply_operator(P, u);
    const double res = residual_norm(u, fu);
    ++used;
    track_best(best, u, fu, res, used);
    if (res <= cfg.tolerance) {
      u = best.u;
      return true;
    }
    std::vector<double> next(u.size());
    for (std::size_t i = 0; i < u.size(); ++i)
      next[i] = (1.0 - omega) * u.value(i) + omega * fu.value(i);
    u = GridFunction(u.lo(), u.hi(), std::move(next));
  }
  return false;
}

inline bool newton_phase(const ProblemInstance& P, const SolverConfig& cfg,
                         GridFunction& u, int iter_budget, int& used,
                         IterationState& best) {
  const int n = static_cast<int>(u.size());
  GridFunction fu = apply_operator(P, u);
  double res = residual_norm(u, fu);
  track_best(best, u, fu, res, used);
  for (int it = 0; it < iter_budget; ++it) {
    if (res <= cfg.tolerance) return true;
    const Eigen::MatrixXd J = residual_jacobian(P, u, fu);
    Eigen::VectorXd R(n);
    for (int i = 0; i < n; ++i) R(i) = u.value(i) - fu.value(i);
    const Eigen::VectorXd d = J.partialPivLu().solve(R);
    if (!d.allFinite()) return false;

    double step = 1.0;
    bool accepted = false;
    for (int halving = 0; halving < 9 && !accepted; ++halving, step *= 0.5) {
      std::vector<double> trial(u.size());
      for (int i = 0; i < n; ++i) trial[i] = u.value(i) - step * d(i);
      GridFunction ut(u.lo(), u.hi(), std::move(trial));
      GridFunction fut = apply_operator(P, ut);
      const double rt = residual_norm(ut, fut);
      ++used;
      if (rt < res) {
        u = std::move(ut);
        fu = std::move(fut);
        res = rt;
        track_best(best, u, fu, res, used);
        accepted = true;
      }
    }
    if (!accepted) return res <= cfg.tolerance;  // stalled
  }
  return res <= cfg.tolerance;
}

}  // namespace detail

// Solves u = Fu from one initial guess. Throws NoConvergenceError (carrying
// the best iterate) when the residual target is not reached.
inline SolutionReport solve(const ProblemInstance& P, const SolverConfig& cfg) {
  cfg.validate();

  GridFunction u = [&] {
    switch (cfg.seed) {
      case SolverConfig::Seed::ConeSeed:
        return cone_seed(P, cfg.grid_points, cfg.seed_level);
      case SolverConfig::Seed::Custom:
        if (!cfg.custom_seed) throw ConfigError("custom seed not provided");
        return *cfg.custom_seed;
      default:
        return trivial_extension(P, cfg.grid_points);
    }
  }();

  detail::IterationState best;
  int used = 0;
  bool converged = false;
  std::string strategy;
  switch (cfg.strategy) {
    case SolverConfig::Strategy::Picard:
      strategy = "picard";
      converged =
          detail::picard_phase(P, cfg, u, cfg.max_iterations, used, best);
      break;
    case SolverConfig::Strategy::NewtonOnDiscretization:
      strategy = "newton";
      converged =
          detail::newton_phase(P, cfg, u, cfg.max_iterations, used, best);
      break;
    case SolverConfig::Strategy::PicardThenNewton: {
      strategy = "picard+newton";
      const int picard_budget = std::min(cfg.max_iterations / 2, 40);
      converged = detail::picard_phase(P, cfg, u, picard_budget, used, best);
      if (!converged) {
        u = best.u;
        converged = detail::newton_phase(
            P, cfg, u, std::max(cfg.max_iterations - picard_budget, 10), used,
            best);
      }
      break;
    }
  }

  SolutionReport rep;
  rep.u = best.u;
  rep.iterations = best.iterations;
  rep.strategy_used = strategy;
  // The reported residual is recomputed from the returned iterate.
  const GridFunction fu = apply_operator(P, rep.u);
  rep.residual = detail::residual_norm(rep.u, fu);
  rep.psi_norm = P.psi_norm();
  rep.v_norm = [&] {
    double m = 0.0;
    for (std::size_t i = 0; i < rep.u.size(); ++i)
      if (rep.u.node(i) >= 0.0) m = std::max(m, std::abs(rep.u.value(i)));
    return m;
  }();
  rep.trivial = rep.v_norm < 10.0 * cfg.tolerance;
  rep.membership = check_cone_membership(P, rep.u, cfg.cone_slack);
  rep.converged = converged && rep.residual <= cfg.tolerance * 1.0000001;
  if (!rep.converged) throw NoConvergenceError(rep);
  return rep;
}

// Seed levels for the multi-start search: the certified rungs, then
// geometric midpoints of the gaps, recursively subdivided `depth` times.
inline std::vector<double> multi_start_levels(const std::vector<double>& rungs,
                                              int depth = 2) {
  std::vector<double> levels = rungs;
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  for (int d = 0; d < depth; ++d) {
    std::vector<double> next;
    for (std::size_t i = 0; i < levels.size(); ++i) {
      next.push_back(levels[i]);
      if (i + 1 < levels.size())
        next.push_back(std::sqrt(levels[i] * levels[i + 1]));
    }
    levels = std::move(next);
  }
  return levels;
}

struct MultiStartResult {
  std::vector<SolutionReport> attempts;  // converged runs only
  std::optional<SolutionReport> best_nontrivial;
  std::optional<SolutionReport> best_trivial;
  std::optional<SolutionReport> best_failed;  // best iterate among failures
  int starts = 0;
};

// Runs the solver from the trivial extension and from cone seeds at the given
// levels. Fixed points guaranteed with index 0 need not attract the Picard
// map, so individual failures are expected and recorded.
inline MultiStartResult multi_start_solve(const ProblemInstance& P,
                                          SolverConfig cfg,
                                          const std::vector<double>& levels) {
  MultiStartResult out;
  auto consider = [&](SolverConfig::Seed seed, double level) {
    cfg.seed = seed;
    cfg.seed_level = level;
    ++out.starts;
    try {
      SolutionReport rep = solve(P, cfg);
      if (!rep.trivial && rep.membership.in_cone()) {
        if (!out.best_nontrivial || rep.residual < out.best_nontrivial->residual)
          out.best_nontrivial = rep;
      } else if (rep.trivial) {
        if (!out.best_trivial || rep.residual < out.best_trivial->residual)
          out.best_trivial = rep;
      }
      out.attempts.push_back(std::move(rep));
    } catch (const NoConvergenceError& e) {
      if (!out.best_failed || e.best().residual < out.best_failed->residual)
        out.best_failed = e.best();
    }
  };

  consider(SolverConfig::Seed::TrivialExtension, 0.0);
  for (double level : levels) consider(SolverConfig::Seed::ConeSeed, level);
  return out;
}

}  // namespace fbvp
