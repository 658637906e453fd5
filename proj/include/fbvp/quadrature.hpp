#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <vector>

namespace fbvp {
namespace quadrature {

// Nodes and weights of an n-point Gauss-Legendre rule on [-1,1].
struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Computes the rule by Newton iteration on the Legendre polynomial.
// Accurate to machine precision for the small n used here.
inline Rule gauss_legendre(int n) {
  Rule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      // Evaluate P_n(x) and P'_n(x) by the three-term recurrence.
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    r.nodes[i] = -x;
    r.nodes[n - 1 - i] = x;
    r.weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
    r.weights[n - 1 - i] = r.weights[i];
  }
  return r;
}

inline const Rule& cached_rule(int n) {
  static const Rule r4 = gauss_legendre(4);
  static const Rule r8 = gauss_legendre(8);
  static const Rule r16 = gauss_legendre(16);
  switch (n) {
    case 4:
      return r4;
    case 8:
      return r8;
    default:
      return r16;
  }
}

// Debug hook: when set to a positive value, panel-splitting at breakpoints is
// disabled and integrals run on exactly that many uniform panels. Used only by
// the CLI --debug-quadrature-panels flag to demonstrate accuracy degradation.
inline std::atomic<int>& debug_uniform_panels() {
  static std::atomic<int> n{0};
  return n;
}

// Builds the sorted panel edges for [lo,hi] from a list of interior
// breakpoints, dropping duplicates and points outside the interval.
inline std::vector<double> panel_edges(double lo, double hi,
                                       const std::vector<double>& breakpoints) {
  std::vector<double> edges;
  const int forced = debug_uniform_panels().load();
  if (forced > 0) {
    edges.reserve(forced + 1);
    for (int i = 0; i <= forced; ++i)
      edges.push_back(lo + (hi - lo) * i / forced);
    return edges;
  }
  edges.push_back(lo);
  for (double b : breakpoints)
    if (b > lo && b < hi) edges.push_back(b);
  edges.push_back(hi);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end(),
                          [](double a, double b) {
                            return std::abs(a - b) < 1e-14;
                          }),
              edges.end());
  return edges;
}

template <class F>
double gauss_panel(const F& f, double lo, double hi, const Rule& rule) {
  const double mid = 0.5 * (lo + hi);
  const double hw = 0.5 * (hi - lo);
  double sum = 0.0;
  for (std::size_t q = 0; q < rule.nodes.size(); ++q)
    sum += rule.weights[q] * f(mid + hw * rule.nodes[q]);
  return hw * sum;
}

// Fixed-rule composite integration with panels split at the given breakpoints.
template <class F>
double integrate_panels(const F& f, double lo, double hi,
                        const std::vector<double>& breakpoints = {},
                        int points = 16) {
  if (hi <= lo) return 0.0;
  const Rule& rule = cached_rule(points);
  double total = 0.0;
  const std::vector<double> edges = panel_edges(lo, hi, breakpoints);
  for (std::size_t i = 0; i + 1 < edges.size(); ++i)
    total += gauss_panel(f, edges[i], edges[i + 1], rule);
  return total;
}

namespace detail {
template <class F>
double adaptive_panel(const F& f, double lo, double hi, double whole,
                      const Rule& rule, double tol, int depth) {
  const double mid = 0.5 * (lo + hi);
  const double left = gauss_panel(f, lo, mid, rule);
  const double right = gauss_panel(f, mid, hi, rule);
  if (depth <= 0 || std::abs(left + right - whole) <= tol)
    return left + right;
  return adaptive_panel(f, lo, mid, left, rule, 0.5 * tol, depth - 1) +
         adaptive_panel(f, mid, hi, right, rule, 0.5 * tol, depth - 1);
}
}  // namespace detail

// Adaptive composite Gauss-Legendre with pre-splitting at breakpoints.
// Subdivides panels until the estimated error is below tol.
template <class F>
double integrate_adaptive(const F& f, double lo, double hi,
                          const std::vector<double>& breakpoints = {},
                          double tol = 1e-11, int points = 16,
                          int max_depth = 24) {
  if (hi <= lo) return 0.0;
  const Rule& rule = cached_rule(points);
  const std::vector<double> edges = panel_edges(lo, hi, breakpoints);
  double total = 0.0;
  const double panel_tol = tol / static_cast<double>(edges.size() - 1);
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    const double whole = gauss_panel(f, edges[i], edges[i + 1], rule);
    total += detail::adaptive_panel(f, edges[i], edges[i + 1], whole, rule,
                                    panel_tol, max_depth);
  }
  return total;
}

}  // namespace quadrature
}  // namespace fbvp
