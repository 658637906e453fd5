#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "fbvp/quadrature.hpp"

using namespace fbvp;

TEST_CASE("gauss-legendre rules integrate polynomials exactly") {
  // 4-point rule: exact through degree 7.
  const double v = quadrature::integrate_panels(
      [](double x) { return 7.0 * std::pow(x, 6); }, 0.0, 1.0, {}, 4);
  REQUIRE(v == Catch::Approx(1.0).margin(1e-14));

  const double w = quadrature::integrate_panels(
      [](double x) { return 31.0 * std::pow(x, 30); }, 0.0, 1.0, {}, 16);
  REQUIRE(w == Catch::Approx(1.0).margin(1e-13));
}

TEST_CASE("breakpoint splitting restores exactness on kinked integrands") {
  // int_0^1 |x - 1/3| dx = 5/18.
  auto f = [](double x) { return std::abs(x - 1.0 / 3.0); };
  const double split =
      quadrature::integrate_panels(f, 0.0, 1.0, {1.0 / 3.0}, 16);
  REQUIRE(split == Catch::Approx(5.0 / 18.0).margin(1e-15));

  const double unsplit = quadrature::integrate_panels(f, 0.0, 1.0, {}, 16);
  REQUIRE(std::abs(unsplit - 5.0 / 18.0) > 1e-9);  // kink costs accuracy
}

TEST_CASE("adaptive integration reaches the requested tolerance") {
  const double v = quadrature::integrate_adaptive(
      [](double x) { return std::exp(x); }, 0.0, 1.0, {}, 1e-12);
  REQUIRE(v == Catch::Approx(std::exp(1.0) - 1.0).margin(1e-11));

  // Kinked integrand without a pre-split still converges by subdivision.
  const double k = quadrature::integrate_adaptive(
      [](double x) { return std::abs(x - 1.0 / 3.0); }, 0.0, 1.0, {}, 1e-11);
  REQUIRE(k == Catch::Approx(5.0 / 18.0).margin(1e-9));
}

TEST_CASE("debug panel override disables breakpoint splitting") {
  quadrature::debug_uniform_panels().store(2);
  auto f = [](double x) { return std::abs(x - 1.0 / 3.0); };
  const double crippled =
      quadrature::integrate_panels(f, 0.0, 1.0, {1.0 / 3.0}, 16);
  quadrature::debug_uniform_panels().store(0);
  REQUIRE(std::abs(crippled - 5.0 / 18.0) > 1e-9);
}
