#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fbvp/certify.hpp"
#include "fbvp/errors.hpp"
#include "fbvp/expr.hpp"
#include "fbvp/problem.hpp"
#include "fbvp/solver.hpp"

namespace fbvp {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

namespace config_detail {

inline PiecewiseLinear parse_pl(const Json& j, const char* what) {
  if (!j.contains("breakpoints") || !j.contains("values"))
    throw ConfigError(std::string(what) + " needs 'breakpoints' and 'values'");
  return PiecewiseLinear(j["breakpoints"].get<std::vector<double>>(),
                         j["values"].get<std::vector<double>>());
}

inline CoreMode parse_mode(const std::string& s) {
  if (s == "sign_changing") return CoreMode::SignChanging;
  if (s == "non_negative") return CoreMode::NonNegative;
  throw ConfigError("unknown mode '" + s + "'");
}

inline KernelFamily parse_kernel(const Json& j) {
  const std::string variant = j.value("variant", "");
  const CoreMode mode = parse_mode(j.value("mode", "sign_changing"));
  if (variant == "thermostat") {
    if (!j.contains("beta") || !j.contains("eta"))
      throw ConfigError("thermostat kernel needs 'beta' and 'eta'");
    return KernelFamily::thermostat(j["beta"].get<double>(),
                                    j["eta"].get<double>(), mode);
  }
  if (variant == "dirichlet") return KernelFamily::dirichlet_nonlocal(mode);
  if (variant == "custom") {
    for (const char* key : {"k", "gamma", "phi", "c1", "c2"})
      if (!j.contains(key))
        throw ConfigError(std::string("custom kernel needs '") + key + "'");
    const Expression k = Expression::parse(j["k"].get<std::string>(), {"t", "s"});
    const Expression ga = Expression::parse(j["gamma"].get<std::string>(), {"t"});
    const Expression phi = Expression::parse(j["phi"].get<std::string>(), {"s"});
    const Expression c1 = Expression::parse(j["c1"].get<std::string>(), {"a", "b"});
    const Expression c2 = Expression::parse(j["c2"].get<std::string>(), {"a", "b"});
    KernelFamily::CustomSpec spec;
    spec.k = [k](double t, double s) { return k.eval({t, s}); };
    spec.gamma = [ga](double t) { return ga.eval({t}); };
    spec.phi = [phi](double s) { return phi.eval({s}); };
    spec.c1 = [c1](double a, double b) { return c1.eval({a, b}); };
    spec.c2 = [c2](double a, double b) { return c2.eval({a, b}); };
    if (j.contains("s_kinks"))
      spec.s_kinks = j["s_kinks"].get<std::vector<double>>();
    return KernelFamily::custom(std::move(spec), mode);
  }
  throw ConfigError("kernel variant must be thermostat, dirichlet or custom");
}

inline SignedMeasure parse_alpha(const Json& j) {
  SignedMeasure m;
  if (j.contains("atoms")) {
    for (const auto& a : j["atoms"]) {
      if (!a.is_array() || a.size() != 2)
        throw ConfigError("alpha atoms must be [location, weight] pairs");
      m.atoms.push_back({a[0].get<double>(), a[1].get<double>()});
    }
  }
  if (j.contains("density") && !j["density"].is_null())
    m.density = parse_pl(j["density"], "alpha density");
  m.validate();
  return m;
}

inline PiecewiseLinear parse_psi(const Json& j, double r) {
  if (j.contains("samples")) return parse_pl(j["samples"], "psi samples");
  const std::string family = j.value("family", "zero");
  if (family == "zero") return zero_psi(r);
  if (family == "bump") {
    const double h = j.value("height", 1.0);
    // h * sin(pi t / r)^2 on [-r, 0]; 257 samples put the peak on a node.
    return PiecewiseLinear(
        [&] {
          std::vector<double> b(257);
          for (int i = 0; i < 257; ++i) b[i] = -r + r * i / 256.0;
          return b;
        }(),
        [&] {
          std::vector<double> v(257);
          for (int i = 0; i < 257; ++i) {
            const double t = -r + r * i / 256.0;
            const double s = std::sin(M_PI * t / r);
            v[i] = h * s * s;
          }
          return v;
        }());
  }
  throw ConfigError("psi family must be zero or bump");
}

inline Nonlinearity parse_nonlinearity(const Json& j) {
  const std::string form = j.value("form", "delay");
  if (!j.contains("r")) throw ConfigError("F needs the delay 'r'");
  const double r = j["r"].get<double>();
  if (form == "delay") {
    if (!j.contains("expr")) throw ConfigError("delay form needs 'expr'");
    const Expression e =
        Expression::parse(j["expr"].get<std::string>(), {"t", "u", "v"});
    Nonlinearity F = Nonlinearity::delay(
        [e](double t, double u, double v) { return e.eval({t, u, v}); }, r);
    F.safety_sup = j.value("safety_sup", 1.0);
    F.safety_inf = j.value("safety_inf", 1.0);
    return F;
  }
  if (form == "envelope") {
    if (!j.contains("table")) throw ConfigError("envelope form needs 'table'");
    std::vector<std::array<double, 3>> table;
    for (const auto& row : j["table"]) {
      if (!row.is_array() || row.size() != 3)
        throw ConfigError("envelope table rows must be [rho, sup, inf]");
      table.push_back({row[0].get<double>(), row[1].get<double>(),
                       row[2].get<double>()});
    }
    if (table.size() < 2)
      throw ConfigError("envelope table needs at least 2 rows");
    std::sort(table.begin(), table.end(),
              [](const auto& a, const auto& b) { return a[0] < b[0]; });
    auto interp = [table](double rho, int col) {
      // Log-linear in rho, clamped at the table ends.
      if (rho <= table.front()[0]) return table.front()[col];
      if (rho >= table.back()[0]) return table.back()[col];
      for (std::size_t i = 0; i + 1 < table.size(); ++i) {
        if (rho <= table[i + 1][0]) {
          const double w = std::log(rho / table[i][0]) /
                           std::log(table[i + 1][0] / table[i][0]);
          const double lo = table[i][col], hi = table[i + 1][col];
          if (lo > 0.0 && hi > 0.0)
            return std::exp((1.0 - w) * std::log(lo) + w * std::log(hi));
          return (1.0 - w) * lo + w * hi;
        }
      }
      return table.back()[col];
    };
    return Nonlinearity::envelope(
        [interp](double, double rho) { return interp(rho, 1); },
        [interp](double, double, double rho, double) { return interp(rho, 2); },
        [](double, const HistorySegment&) -> double {
          throw ConfigError(
              "envelope-form nonlinearity has no pointwise evaluator; "
              "solving needs the delay form");
        },
        r);
  }
  throw ConfigError("F form must be delay or envelope");
}

}  // namespace config_detail

struct ParsedConfig {
  ProblemInstance problem;
  SolverConfig solver;
  CertifyOptions certify;
  std::vector<double> seed_levels;  // explicit multi-start levels, may be empty
};

inline ParsedConfig parse_config(const Json& j) {
  using namespace config_detail;
  if (!j.is_object()) throw ConfigError("config root must be a JSON object");
  const int schema = j.value("schema", 1);
  if (schema != 1)
    throw ConfigError("unsupported schema version " + std::to_string(schema));
  if (!j.contains("kernel")) throw ConfigError("config needs 'kernel'");
  if (!j.contains("interval")) throw ConfigError("config needs 'interval'");
  if (!j.contains("F")) throw ConfigError("config needs 'F'");

  KernelFamily kernel = parse_kernel(j["kernel"]);
  const double a = j["interval"].value("a", 0.0);
  const double b = j["interval"].value("b", 0.0);
  ConeData cone = kernel.cone_constants(a, b);

  Nonlinearity F = parse_nonlinearity(j["F"]);
  const double r = F.r;

  PiecewiseLinear g =
      j.contains("g") ? parse_pl(j["g"], "g") : unit_weight();
  SignedMeasure alpha =
      j.contains("alpha") ? parse_alpha(j["alpha"]) : SignedMeasure::zero();
  PiecewiseLinear psi =
      j.contains("psi") ? parse_psi(j["psi"], r) : zero_psi(r);

  const CoreMode mode = kernel.mode();
  ProblemInstance problem(std::move(kernel), std::move(cone), std::move(g),
                          std::move(alpha), std::move(psi), r, std::move(F),
                          mode);

  ParsedConfig out{std::move(problem), SolverConfig{}, CertifyOptions{}, {}};
  if (j.contains("solver")) {
    const Json& s = j["solver"];
    out.solver.grid_points = s.value("grid", out.solver.grid_points);
    out.solver.relaxation = s.value("relaxation", out.solver.relaxation);
    out.solver.max_iterations =
        s.value("max_iterations", out.solver.max_iterations);
    out.solver.tolerance = s.value("tolerance", out.solver.tolerance);
    const std::string strat = s.value("strategy", "picard_then_newton");
    if (strat == "picard") {
      out.solver.strategy = SolverConfig::Strategy::Picard;
    } else if (strat == "newton") {
      out.solver.strategy = SolverConfig::Strategy::NewtonOnDiscretization;
    } else if (strat == "picard_then_newton") {
      out.solver.strategy = SolverConfig::Strategy::PicardThenNewton;
    } else {
      throw ConfigError("unknown solver strategy '" + strat + "'");
    }
    if (s.contains("seed_levels"))
      out.seed_levels = s["seed_levels"].get<std::vector<double>>();
    out.solver.validate();
  }
  if (j.contains("certify")) {
    const Json& c = j["certify"];
    if (c.contains("ladder"))
      out.certify.ladder = c["ladder"].get<std::vector<double>>();
    out.certify.rho_max = c.value("rho_max", out.certify.rho_max);
    out.certify.budget = c.value("budget", out.certify.budget);
  }
  return out;
}

inline Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("JSON parse failure in '" + path + "': " + e.what());
  }
}

inline ParsedConfig load_config(const std::string& path) {
  return parse_config(load_json_file(path));
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

inline Json json_number(double x) {
  if (std::isfinite(x)) return x;
  return nullptr;  // inf/nan have no JSON representation
}

inline Json hypotheses_to_json(const HypothesesReport& rep) {
  Json j = Json::object();
  for (const auto& c : rep.checks) {
    j[c.id] = {{"pass", c.pass},
               {"value", json_number(c.value)},
               {"note", c.note}};
  }
  return j;
}

inline Json certificate_to_json(const Certificate& cert) {
  Json ladder = Json::array();
  for (const auto& r : cert.ladder) {
    ladder.push_back(
        {{"rho", r.rho},
         {"kind", r.kind == RungKind::Index1 ? "index1" : "index0"},
         {"margin", json_number(r.margin)}});
  }
  Json probes = Json::array();
  for (const auto& p : cert.probes) {
    Json jp = {{"rho", p.rho}};
    if (p.index1_checked) {
      jp["index1"] = {{"holds", p.index1.holds},
                      {"margin", json_number(p.index1.margin)},
                      {"growth_number", json_number(p.index1.growth_number)}};
    }
    jp["index0"] = {{"holds", p.index0.holds},
                    {"margin", json_number(p.index0.margin)},
                    {"growth_number", json_number(p.index0.growth_number)}};
    probes.push_back(jp);
  }
  return Json{{"pattern", pattern_name(cert.pattern)},
              {"solutions", cert.guaranteed_solutions},
              {"ladder", ladder},
              {"m", json_number(cert.m)},
              {"M", json_number(cert.big_m)},
              {"psi_norm", json_number(cert.psi_norm)},
              {"c", json_number(cert.c)},
              {"mode", cert.mode == CoreMode::NonNegative ? "non_negative"
                                                          : "sign_changing"},
              {"advisory_same_norm", cert.advisory_same_norm},
              {"growth_numbers", "grid-estimated, non-rigorous"},
              {"probes", probes},
              {"hypotheses", hypotheses_to_json(cert.hypotheses)}};
}

inline const char* verdict_name(const ConeMembership& m) {
  switch (m.verdict) {
    case ConeMembership::Verdict::InKpsi: return "in_K_psi";
    case ConeMembership::Verdict::InPositiveCone: return "in_positive_cone";
    default: return "outside";
  }
}

inline Json solution_to_json(const SolutionReport& rep) {
  return Json{{"residual", json_number(rep.residual)},
              {"iterations", rep.iterations},
              {"strategy", rep.strategy_used},
              {"converged", rep.converged},
              {"trivial", rep.trivial},
              {"psi_norm", json_number(rep.psi_norm)},
              {"v_norm", json_number(rep.v_norm)},
              {"cone", verdict_name(rep.membership)},
              {"cone_min_margin", json_number(rep.membership.min_margin)},
              {"cone_alpha_value", json_number(rep.membership.alpha_value)},
              {"violated_clause", rep.membership.violated_clause}};
}

inline std::string solution_to_csv(const SolutionReport& rep) {
  std::ostringstream os;
  os.precision(17);
  os << "# residual=" << rep.residual << " cone=" << verdict_name(rep.membership)
     << " psi_norm=" << rep.psi_norm << " v_norm=" << rep.v_norm
     << " trivial=" << (rep.trivial ? 1 : 0) << "\n";
  os << "t,u\n";
  for (std::size_t i = 0; i < rep.u.size(); ++i)
    os << rep.u.node(i) << "," << rep.u.value(i) << "\n";
  return os.str();
}

}  // namespace fbvp
