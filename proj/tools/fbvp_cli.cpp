// Command-line front end: certify, solve, constants, validate, reproduce.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "fbvp/fbvp.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNoResult = 1;   // no pattern / only trivial solution
constexpr int kExitConfig = 2;     // config parse failure
constexpr int kExitHypothesis = 3; // hypothesis precondition failure
constexpr int kExitNoConvergence = 4;

struct CommonOpts {
  std::string config_path;
  std::string out_path;
  int grid = 0;
  double tol = 0.0;
  double rho_max = 0.0;
  long seed = 0;
  int debug_panels = 0;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool needs_config) {
  auto* c = cmd->add_option("--config", opts.config_path,
                            "problem configuration (JSON)");
  if (needs_config) c->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", opts.out_path, "output path");
  cmd->add_option("--grid", opts.grid, "solver grid override");
  cmd->add_option("--tol", opts.tol, "solver tolerance override");
  cmd->add_option("--rho-max", opts.rho_max, "certification search ceiling");
  cmd->add_option("--seed", opts.seed, "run seed recorded in reports");
  cmd->add_option("--debug-quadrature-panels", opts.debug_panels,
                  "debug: force this many uniform quadrature panels");
}

void apply_debug(const CommonOpts& opts) {
  fbvp::quadrature::debug_uniform_panels().store(opts.debug_panels);
}

fbvp::ParsedConfig load(const CommonOpts& opts) {
  fbvp::ParsedConfig cfg = fbvp::load_config(opts.config_path);
  if (opts.grid > 0) cfg.solver.grid_points = opts.grid;
  if (opts.tol > 0.0) cfg.solver.tolerance = opts.tol;
  if (opts.rho_max > 0.0) cfg.certify.rho_max = opts.rho_max;
  cfg.solver.validate();
  return cfg;
}

void write_or_print(const std::string& path, const std::string& payload) {
  if (path.empty()) {
    std::cout << payload << "\n";
    return;
  }
  std::ofstream out(path);
  if (!out) throw fbvp::ConfigError("cannot write output file '" + path + "'");
  out << payload;
}

// Maps a constants-stage precondition failure to the hypothesis it encodes.
int hypothesis_exit(const std::string& label, const std::string& what) {
  std::cerr << "hypothesis " << label << " failed: " << what << "\n";
  return kExitHypothesis;
}

int run_validate(const CommonOpts& opts) {
  const fbvp::ParsedConfig cfg = load(opts);
  const fbvp::HypothesesReport rep = fbvp::validate_hypotheses(cfg.problem);
  for (const auto& c : rep.checks) {
    std::printf("(%s) %-4s value=%-14.6g %s\n", c.id.c_str(),
                c.pass ? "pass" : "FAIL", c.value, c.note.c_str());
  }
  if (!opts.out_path.empty())
    write_or_print(opts.out_path, fbvp::hypotheses_to_json(rep).dump(2));
  if (const auto* fail = rep.first_hard_failure())
    return hypothesis_exit("(" + fail->id + ")", fail->note);
  return kExitOk;
}

int run_constants(const CommonOpts& opts) {
  const fbvp::ParsedConfig cfg = load(opts);
  const fbvp::ProblemInstance& P = cfg.problem;

  const fbvp::ExtremalConstant m = fbvp::compute_m(P);
  const fbvp::ExtremalConstant M = fbvp::compute_M(P);
  const double ag = P.alpha_gamma();
  const double var = fbvp::total_variation(P.alpha);

  fbvp::Json phi_samples = fbvp::Json::array();
  for (int i = 0; i <= 8; ++i) {
    const double s = i / 8.0;
    phi_samples.push_back({{"s", s}, {"phi", P.cone.phi(s)}});
  }
  fbvp::Json j{{"seed", opts.seed},
               {"a", P.cone.a},
               {"b", P.cone.b},
               {"c1", P.cone.c1},
               {"c2", P.cone.c2},
               {"c", P.cone.c},
               {"m", fbvp::json_number(m.value)},
               {"recip_m", fbvp::json_number(m.reciprocal)},
               {"m_degenerate", m.degenerate},
               {"M", fbvp::json_number(M.value)},
               {"recip_M", fbvp::json_number(M.reciprocal)},
               {"M_degenerate", M.degenerate},
               {"alpha_gamma", ag},
               {"var_A", var},
               {"phi", phi_samples}};

  std::printf("c1 = %.10g\nc2 = %.10g\nc  = %.10g\n", P.cone.c1, P.cone.c2,
              P.cone.c);
  if (m.degenerate)
    std::printf("m  = degenerate (bracket vanished; index-1 holds vacuously)\n");
  else
    std::printf("m  = %.10g   (1/m = %.10g at t=%.6g)\n", m.value, m.reciprocal,
                m.arg_t);
  if (M.degenerate)
    std::printf("M  = degenerate (bracket vanished)\n");
  else
    std::printf("M  = %.10g   (1/M = %.10g at t=%.6g)\n", M.value, M.reciprocal,
                M.arg_t);
  std::printf("alpha[gamma] = %.10g\nVar(A) = %.10g\n", ag, var);
  if (!opts.out_path.empty()) write_or_print(opts.out_path, j.dump(2));
  return kExitOk;
}

int run_certify(const CommonOpts& opts) {
  const fbvp::ParsedConfig cfg = load(opts);
  const fbvp::HypothesesReport rep = fbvp::validate_hypotheses(cfg.problem);
  if (const auto* fail = rep.first_hard_failure())
    return hypothesis_exit("(" + fail->id + ")", fail->note);

  fbvp::Certificate cert = fbvp::certify_instance(cfg.problem, cfg.certify);
  cert.hypotheses = rep;
  fbvp::Json j = fbvp::certificate_to_json(cert);
  j["seed"] = opts.seed;
  write_or_print(opts.out_path, j.dump(2));
  std::cerr << "pattern " << fbvp::pattern_name(cert.pattern) << ", "
            << cert.guaranteed_solutions << " guaranteed solution(s)\n";
  return cert.pattern == fbvp::Pattern::None ? kExitNoResult : kExitOk;
}

int run_solve(const CommonOpts& opts) {
  const fbvp::ParsedConfig cfg = load(opts);
  const fbvp::ProblemInstance& P = cfg.problem;
  const fbvp::HypothesesReport rep = fbvp::validate_hypotheses(P);
  if (const auto* fail = rep.first_hard_failure())
    return hypothesis_exit("(" + fail->id + ")", fail->note);

  std::vector<double> levels = cfg.seed_levels;
  fbvp::Json cert_json;
  if (levels.empty()) {
    fbvp::Certificate cert = fbvp::certify_instance(P, cfg.certify);
    cert.hypotheses = rep;
    cert_json = fbvp::certificate_to_json(cert);
    std::vector<double> rungs;
    for (const auto& r : cert.ladder) rungs.push_back(r.rho);
    if (rungs.empty()) rungs = {1.0};
    levels = fbvp::multi_start_levels(rungs, 2);
  }

  const fbvp::MultiStartResult res =
      fbvp::multi_start_solve(P, cfg.solver, levels);

  const fbvp::SolutionReport* pick = nullptr;
  int code = kExitNoConvergence;
  if (res.best_nontrivial) {
    pick = &*res.best_nontrivial;
    code = kExitOk;
  } else if (res.best_trivial) {
    pick = &*res.best_trivial;
    code = kExitNoResult;
  } else if (res.best_failed) {
    pick = &*res.best_failed;
    code = kExitNoConvergence;
  }

  fbvp::Json j{{"seed", opts.seed},
               {"starts", res.starts},
               {"seed_levels", levels},
               {"outcome", code == kExitOk ? "nontrivial"
                           : code == kExitNoResult ? "trivial_only"
                                                   : "no_convergence"}};
  if (!cert_json.is_null()) j["certificate"] = cert_json;
  if (pick) {
    j["solution"] = fbvp::solution_to_json(*pick);
    j["alpha_consistency"] =
        fbvp::json_number(fbvp::alpha_consistency(P, pick->u));
  }

  if (!opts.out_path.empty()) {
    write_or_print(opts.out_path + ".json", j.dump(2));
    if (pick) write_or_print(opts.out_path + ".csv",
                             fbvp::solution_to_csv(*pick));
  } else {
    std::cout << j.dump(2) << "\n";
  }
  return code;
}

int run_reproduce(const CommonOpts& opts) {
  const auto rows = fbvp::reference::run_reference_checks();
  bool all_pass = true;
  std::printf("%-42s %-14s %-14s %-10s %s\n", "quantity", "expected",
              "computed", "|diff|", "status");
  fbvp::Json j = fbvp::Json::array();
  for (const auto& r : rows) {
    std::printf("%-42s %-14.10g %-14.10g %-10.3g %s\n", r.quantity.c_str(),
                r.expected, r.computed, r.diff, r.pass ? "pass" : "FAIL");
    j.push_back({{"quantity", r.quantity},
                 {"expected", r.expected},
                 {"computed", r.computed},
                 {"diff", r.diff},
                 {"pass", r.pass}});
    all_pass = all_pass && r.pass;
  }
  if (!opts.out_path.empty()) write_or_print(opts.out_path, j.dump(2));
  return all_pass ? kExitOk : kExitNoResult;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"certification and solving of nonlocal functional boundary "
               "value problems"};
  app.require_subcommand(1);

  CommonOpts opts;
  CLI::App* constants = app.add_subcommand(
      "constants", "kernel envelope, cone constants, m and M(a,b)");
  add_common(constants, opts, true);
  CLI::App* certify = app.add_subcommand(
      "certify", "validate hypotheses and emit a multiplicity certificate");
  add_common(certify, opts, true);
  CLI::App* solve =
      app.add_subcommand("solve", "multi-start fixed point solve");
  add_common(solve, opts, true);
  CLI::App* validate =
      app.add_subcommand("validate", "hypothesis report only");
  add_common(validate, opts, true);
  CLI::App* reproduce = app.add_subcommand(
      "reproduce", "recompute built-in reference constants");
  add_common(reproduce, opts, false);

  CLI11_PARSE(app, argc, argv);
  apply_debug(opts);

  try {
    if (*constants) return run_constants(opts);
    if (*certify) return run_certify(opts);
    if (*solve) return run_solve(opts);
    if (*validate) return run_validate(opts);
    if (*reproduce) return run_reproduce(opts);
  } catch (const fbvp::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const fbvp::AlphaGammaInvalidError& e) {
    return hypothesis_exit("(C7)", e.what());
  } catch (const fbvp::DelayTooLargeError& e) {
    return hypothesis_exit("(C8)", e.what());
  } catch (const fbvp::IntervalInvalidError& e) {
    return hypothesis_exit("(C3)", e.what());
  } catch (const fbvp::ModeUnsupportedError& e) {
    return hypothesis_exit("(C3)", e.what());
  } catch (const fbvp::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}
