#include <catch2/catch_amalgamated.hpp>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#ifndef FBVP_CLI_PATH
#error "FBVP_CLI_PATH must point at the CLI binary"
#endif

namespace {

struct RunResult {
  int code = -1;
  std::string stdout_text;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunResult run(const std::string& args) {
  const std::string out = "/tmp/fbvp_cli_stdout.txt";
  const std::string cmd =
      std::string(FBVP_CLI_PATH) + " " + args + " > " + out + " 2>/dev/null";
  const int raw = std::system(cmd.c_str());
  RunResult r;
  r.code = WEXITSTATUS(raw);
  r.stdout_text = slurp(out);
  return r;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

const char* kCorollaryConfig = R"({
  "schema": 1,
  "kernel": {"variant": "thermostat", "beta": 0.25, "eta": 0.25,
             "mode": "sign_changing"},
  "interval": {"a": 0.25, "b": 0.4375},
  "psi": {"family": "bump", "height": 0.5},
  "F": {"form": "delay", "expr": "0.5*abs(u)*abs(v)", "r": 0.15},
  "certify": {"ladder": [1.0, 10000.0]}
})";

}  // namespace

TEST_CASE("reproduce: reference constants pass, degraded quadrature fails") {
  const RunResult ok = run("reproduce");
  REQUIRE(ok.code == 0);
  REQUIRE(ok.stdout_text.find("FAIL") == std::string::npos);
  REQUIRE(ok.stdout_text.find("1/m thermostat") != std::string::npos);

  const RunResult degraded = run("reproduce --debug-quadrature-panels 2");
  REQUIRE(degraded.code == 1);
  REQUIRE(degraded.stdout_text.find("FAIL") != std::string::npos);
}

TEST_CASE("constants on the reference configuration") {
  write_file("/tmp/fbvp_corollary.json", kCorollaryConfig);
  const RunResult r = run("constants --config /tmp/fbvp_corollary.json "
                          "--out /tmp/fbvp_constants.json");
  REQUIRE(r.code == 0);
  REQUIRE(r.stdout_text.find("c1 = 0.125") != std::string::npos);
  REQUIRE(r.stdout_text.find("c2 = 0.25") != std::string::npos);
  const auto j = nlohmann::json::parse(slurp("/tmp/fbvp_constants.json"));
  REQUIRE(std::abs(j["m"].get<double>() - 16.0 / 17.0) < 1e-8);
  REQUIRE(std::abs(j["M"].get<double>() - 640.0 / 3.0) < 1e-4);
}

TEST_CASE("certify exit codes partition the outcomes") {
  write_file("/tmp/fbvp_corollary.json", kCorollaryConfig);
  const RunResult ok = run(
      "certify --config /tmp/fbvp_corollary.json --out /tmp/fbvp_cert.json");
  REQUIRE(ok.code == 0);
  auto cert = nlohmann::json::parse(slurp("/tmp/fbvp_cert.json"));
  REQUIRE(cert["pattern"] == "S2");
  REQUIRE(cert["ladder"][0]["rho"] == 1.0);

  // Determinism: a second run yields a byte-identical report.
  const RunResult again = run(
      "certify --config /tmp/fbvp_corollary.json --out /tmp/fbvp_cert2.json");
  REQUIRE(again.code == 0);
  REQUIRE(slurp("/tmp/fbvp_cert.json") == slurp("/tmp/fbvp_cert2.json"));

  // f = 0 certifies nothing: exit 1, pattern none.
  std::string zero = kCorollaryConfig;
  zero.replace(zero.find("0.5*abs(u)*abs(v)"), 17, "0");
  write_file("/tmp/fbvp_zero.json", zero);
  const RunResult none = run(
      "certify --config /tmp/fbvp_zero.json --out /tmp/fbvp_none.json");
  REQUIRE(none.code == 1);
  REQUIRE(nlohmann::json::parse(slurp("/tmp/fbvp_none.json"))["pattern"] ==
          "none");

  // Delay too large: hypothesis (C8) rejected with exit 3.
  std::string late = kCorollaryConfig;
  late.replace(late.find("\"r\": 0.15"), 9, "\"r\": 0.2");
  write_file("/tmp/fbvp_late.json", late);
  REQUIRE(run("certify --config /tmp/fbvp_late.json").code == 3);

  // Malformed JSON: exit 2.
  write_file("/tmp/fbvp_bad.json", "{ not json");
  REQUIRE(run("certify --config /tmp/fbvp_bad.json").code == 2);

  // Missing file is a config error as well.
  REQUIRE(run("certify --config /tmp/does_not_exist.json").code != 0);
}

TEST_CASE("solve produces a CSV with the closed-form solution") {
  const char* config = R"({
    "schema": 1,
    "kernel": {"variant": "dirichlet", "mode": "sign_changing"},
    "interval": {"a": 0.25, "b": 0.75},
    "F": {"form": "delay", "expr": "1", "r": 0.25},
    "solver": {"grid": 161, "tolerance": 1e-10, "seed_levels": [0.1]}
  })";
  write_file("/tmp/fbvp_affine.json", config);
  const RunResult r = run(
      "solve --config /tmp/fbvp_affine.json --out /tmp/fbvp_solution");
  REQUIRE(r.code == 0);

  const auto j = nlohmann::json::parse(slurp("/tmp/fbvp_solution.json"));
  REQUIRE(j["outcome"] == "nontrivial");
  REQUIRE(j["solution"]["cone"] == "in_K_psi");

  // u(1/2) = 1/8 on the exported grid.
  const std::string csv = slurp("/tmp/fbvp_solution.csv");
  REQUIRE(csv.find("# residual=") == 0);
  std::istringstream lines(csv);
  std::string line;
  bool found = false;
  while (std::getline(lines, line)) {
    if (line.rfind("0.5,", 0) == 0) {
      const double u = std::stod(line.substr(4));
      REQUIRE(std::abs(u - 0.125) < 1e-8);
      found = true;
    }
  }
  REQUIRE(found);
}

TEST_CASE("solve reports trivial-only outcomes with exit 1") {
  const char* config = R"({
    "schema": 1,
    "kernel": {"variant": "dirichlet", "mode": "sign_changing"},
    "interval": {"a": 0.25, "b": 0.75},
    "F": {"form": "delay", "expr": "0", "r": 0.25},
    "solver": {"grid": 65, "seed_levels": [1.0]}
  })";
  write_file("/tmp/fbvp_trivial.json", config);
  const RunResult r = run("solve --config /tmp/fbvp_trivial.json");
  REQUIRE(r.code == 1);
}
