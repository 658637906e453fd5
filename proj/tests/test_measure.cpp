#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <random>

#include "fbvp/kernel.hpp"
#include "fbvp/measure.hpp"

using namespace fbvp;

namespace {

PiecewiseLinear random_pl(std::mt19937& rng, double lo, double hi, int pieces) {
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  std::vector<double> b(pieces + 1), v(pieces + 1);
  for (int i = 0; i <= pieces; ++i) {
    b[i] = lo + (hi - lo) * i / pieces;
    v[i] = val(rng);
  }
  return PiecewiseLinear(std::move(b), std::move(v));
}

}  // namespace

TEST_CASE("total variation of atoms and density") {
  const auto a = SignedMeasure::from_atoms({{0.5, 2.0}, {0.7, -1.0}});
  REQUIRE(total_variation(a) == Catch::Approx(3.0).margin(1e-15));

  const auto d =
      SignedMeasure::from_density(PiecewiseLinear::constant(0.0, 1.0, 1.0));
  REQUIRE(total_variation(d) == Catch::Approx(1.0).margin(1e-15));

  const auto both = SignedMeasure::from_parts(
      {{0.25, 1.0}}, PiecewiseLinear::constant(0.0, 1.0, -2.0));
  REQUIRE(total_variation(both) == Catch::Approx(3.0).margin(1e-15));

  REQUIRE(total_variation(SignedMeasure::zero()) == 0.0);
}

TEST_CASE("integral of |density| splits segments at zero crossings") {
  // density ramps from -1 to 1: int |.| = 1/2.
  const auto m =
      SignedMeasure::from_density(PiecewiseLinear({0.0, 1.0}, {-1.0, 1.0}));
  REQUIRE(total_variation(m) == Catch::Approx(0.5).margin(1e-15));
}

TEST_CASE("apply evaluates the boundary functional") {
  const auto atoms = SignedMeasure::from_atoms({{0.3, 0.5}, {0.9, 0.25}});
  REQUIRE(apply(atoms, [](double) { return 1.0; }) ==
          Catch::Approx(0.75).margin(1e-15));
  REQUIRE(apply(atoms, [](double) { return 0.0; }) == 0.0);

  const auto lebesgue =
      SignedMeasure::from_density(PiecewiseLinear::constant(0.0, 1.0, 1.0));
  REQUIRE(apply(lebesgue, [](double t) { return t; }) ==
          Catch::Approx(0.5).margin(1e-10));
  REQUIRE(apply(lebesgue, [](double) { return 0.0; }) == 0.0);
}

TEST_CASE("kernel moment against hand-evaluated Dirichlet kernel") {
  const auto fam = KernelFamily::dirichlet_nonlocal();
  const auto unit = SignedMeasure::from_atoms({{0.5, 1.0}});
  const auto ka = kernel_moment(unit, fam);
  // k(1/2, 1/4) = 1/2 * 3/4 - 1/4 = 1/8.
  REQUIRE(ka(0.25) == Catch::Approx(0.125).margin(1e-15));
  // k(1/2, 3/4) = 1/2 * 1/4 (the (t-s) branch is off) = 1/8.
  REQUIRE(ka(0.75) == Catch::Approx(0.125).margin(1e-15));

  const auto zero = kernel_moment(SignedMeasure::zero(), fam);
  REQUIRE(zero(0.3) == 0.0);

  // Purely atomic moments equal the finite sum exactly.
  const auto two = SignedMeasure::from_atoms({{0.3, 0.7}, {0.8, -0.2}});
  const auto ka2 = kernel_moment(two, fam);
  for (double s : {0.1, 0.45, 0.9}) {
    const double expected = 0.7 * fam.k(0.3, s) - 0.2 * fam.k(0.8, s);
    REQUIRE(ka2(s) == expected);
  }
}

TEST_CASE("kernel moment integrates a density against the kernel") {
  const auto fam = KernelFamily::dirichlet_nonlocal();
  const auto m =
      SignedMeasure::from_density(PiecewiseLinear::constant(0.0, 1.0, 1.0));
  const auto ka = kernel_moment(m, fam);
  // int_0^1 k(t,s) dt for the Dirichlet kernel = s(1-s)/2 (hand computation:
  // int_0^1 t(1-s) dt - int_s^1 (t-s) dt = (1-s)/2 - (1-s)^2/2).
  for (double s : {0.2, 0.5, 0.8}) {
    const double expected = 0.5 * (1.0 - s) - 0.5 * (1.0 - s) * (1.0 - s);
    REQUIRE(ka(s) == Catch::Approx(expected).margin(1e-10));
  }
}

TEST_CASE("positivity check finds sign violations") {
  const auto fam = KernelFamily::dirichlet_nonlocal();

  const auto zero = check_positivity([](double) { return 0.0; }, 1001);
  REQUIRE(zero.nonnegative);

  const auto unit = SignedMeasure::from_atoms({{0.5, 1.0}});
  const auto pos = check_positivity(kernel_moment(unit, fam), 1001);
  REQUIRE(pos.nonnegative);

  const auto neg = SignedMeasure::from_atoms({{0.5, -1.0}});
  const auto bad = check_positivity(kernel_moment(neg, fam), 1001);
  REQUIRE_FALSE(bad.nonnegative);
  // k(1/2, s) peaks at s = 1/2, so the worst point sits there.
  REQUIRE(bad.worst_point == Catch::Approx(0.5).margin(1e-2));
  REQUIRE(bad.worst_value == Catch::Approx(-0.25).margin(1e-3));
}

TEST_CASE("apply is linear and bounded by the total variation") {
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  for (int trial = 0; trial < 25; ++trial) {
    const auto A = SignedMeasure::from_parts(
        {{0.2, coef(rng)}, {0.9, coef(rng)}}, random_pl(rng, 0.0, 1.0, 4));
    const auto u = random_pl(rng, 0.0, 1.0, 5);
    const auto w = random_pl(rng, 0.0, 1.0, 3);
    const double x = coef(rng), y = coef(rng);

    const auto combo = [&](double s) { return x * u(s) + y * w(s); };
    std::vector<double> brk = u.breakpoints();
    const auto wb = w.breakpoints();
    brk.insert(brk.end(), wb.begin(), wb.end());

    const double lhs = apply(A, combo, brk);
    const double rhs = x * apply(A, u, u.breakpoints()) +
                       y * apply(A, w, w.breakpoints());
    REQUIRE(lhs == Catch::Approx(rhs).margin(1e-10));

    const double bound = u.max_abs() * total_variation(A);
    REQUIRE(std::abs(apply(A, u, u.breakpoints())) <= bound + 1e-10);
  }
}

TEST_CASE("apply vanishes on functions supported in the history interval") {
  // The zero extension of any initial datum is zero on [0,1], where the
  // measure lives.
  const auto A = SignedMeasure::from_parts(
      {{0.5, 1.5}}, PiecewiseLinear({0.0, 0.5, 1.0}, {1.0, -1.0, 2.0}));
  const auto psi_ext = [](double t) { return t < 0.0 ? std::sin(t) : 0.0; };
  REQUIRE(apply(A, psi_ext) == 0.0);
}

TEST_CASE("measure construction rejects out-of-range support") {
  REQUIRE_THROWS_AS(SignedMeasure::from_atoms({{1.5, 1.0}}), ConfigError);
  REQUIRE_THROWS_AS(SignedMeasure::from_atoms({{-0.1, 1.0}}), ConfigError);
}
