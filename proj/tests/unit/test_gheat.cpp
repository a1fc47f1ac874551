#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "gexp/gheat.hpp"
#include "oracles.hpp"

using namespace gexp;

TEST_CASE("G operator") {
  VolatilityBand band(0.5, 1.0);
  CHECK(g_operator(2.0, band) == doctest::Approx(1.0));
  CHECK(g_operator(-2.0, band) == doctest::Approx(-0.25));
  CHECK(g_operator(0.0, band) == 0.0);
}

TEST_CASE("G-normal second moments") {
  VolatilityBand band(0.5, 1.0);
  auto sq = catalog::clipped_square();
  auto up = solve(Equation::g_heat(), sq, band, 1.0, default_grid());
  auto down = solve(Equation::g_heat(), sq.negated(), band, 1.0, default_grid());
  CHECK(up.at(0.0) == doctest::Approx(1.0).epsilon(1e-2));
  CHECK(down.at(0.0) == doctest::Approx(-0.25).epsilon(1e-2));
}

TEST_CASE("degenerate band reduces to the classical Gaussian semigroup") {
  VolatilityBand band(1.0, 1.0);
  for (const auto& f : catalog::all()) {
    for (double x : {-1.0, 0.0, 1.0}) {
      auto bm = oracle::brownian_law(x, 1.0);
      double ref = oracle::normal_expectation(f, bm.mean, bm.sd);
      double got = pbar_pde(GsdeSpec::zero(GsdeKind::QvDriven), f, x, 1.0, band, default_grid());
      CHECK(got == doctest::Approx(ref).epsilon(kPdeRelTolerance));
      auto ou = oracle::ou_law(x, 1.0);
      ref = oracle::normal_expectation(f, ou.mean, ou.sd);
      got = pbar_pde(GsdeSpec::ou(GsdeKind::QvDriven), f, x, 1.0, band, default_grid());
      CHECK(got == doctest::Approx(ref).epsilon(kPdeRelTolerance));
    }
  }
}

TEST_CASE("comparison principle and constants") {
  VolatilityBand band(0.5, 1.0);
  auto eq = Equation::of(GsdeSpec::tanh(1.0, GsdeKind::QvDriven));
  auto lo = solve(eq, catalog::sigmoid(), band, 1.0, default_grid());
  auto hi = solve(eq, catalog::sigmoid().plus_constant(0.1), band, 1.0, default_grid());
  auto one = solve(eq, catalog::constant(1.0), band, 1.0, default_grid());
  for (std::size_t j = 0; j < lo.values.size(); ++j) {
    CHECK(lo.values[j] <= hi.values[j]);
    CHECK(one.values[j] == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("single march series equals separate solves") {
  VolatilityBand band(0.5, 1.0);
  auto eq = Equation::g_heat();
  std::vector<double> ts{0.5, 1.0};
  auto series = solve_series(eq, catalog::lorentzian(), band, ts, default_grid());
  REQUIRE(series.size() == 2);
  auto last = solve(eq, catalog::lorentzian(), band, 1.0, default_grid());
  // the series shortens one step to land on T = 0.5, so agreement is to scheme accuracy
  CHECK(series[1].at(0.3) == doctest::Approx(last.at(0.3)).epsilon(1e-4));
  CHECK_THROWS(solve_series(eq, catalog::lorentzian(), band, std::vector<double>{1.0, 0.5},
                            default_grid()));
}

TEST_CASE("boundary zone and grid helpers") {
  VolatilityBand band(0.5, 1.0);
  Grid1D g = default_grid();
  CHECK(g.nx() == 401);
  CHECK(g.dx() == doctest::Approx(0.05));
  CHECK(g.refined().nx() == 801);
  CHECK(g.doubled().x_max() == doctest::Approx(20.0));
  Interval safe = padded_interval(g, band, 1.0);
  CHECK(safe.lo > g.x_min());
  CHECK(safe.hi < g.x_max());
  CHECK(safe.lo < 0.0);
  CHECK_THROWS_AS(pbar_pde(GsdeSpec::zero(GsdeKind::QvDriven), catalog::sigmoid(), 9.9, 1.0,
                           band, g),
                  std::out_of_range);
  CHECK(max_stable_dt(Equation::g_heat(), band, g) == doctest::Approx(g.dx() * g.dx()).epsilon(0.2));
}

TEST_CASE("truncation change is small for bounded payoffs") {
  VolatilityBand band(0.5, 1.0);
  CHECK(truncation_change(GsdeSpec::ou(GsdeKind::QvDriven), catalog::sigmoid(), 0.0, 1.0, band,
                          default_grid()) < 1e-5);
}

TEST_CASE("PDE axioms on the catalog") {
  VolatilityBand band(0.5, 1.0);
  auto payoffs = catalog::all();
  for (auto eq : {Equation::g_heat(), Equation::of(GsdeSpec::ou(GsdeKind::QvDriven)),
                  Equation::of(GsdeSpec::tanh(1.0, GsdeKind::TimeDriven))}) {
    auto checks = check_axioms_pde(eq, band, 1.0, default_grid(), payoffs);
    CHECK_FALSE(checks.empty());
    for (const auto& c : checks) {
      INFO(c.axiom << " " << c.detail << " " << c.worst_violation);
      CHECK(c.pass);
    }
  }
}

TEST_CASE("solution CSV") {
  auto sol = solve(Equation::g_heat(), catalog::sigmoid(), VolatilityBand(1.0, 1.0), 0.1,
                   Grid1D(-1.0, 1.0, 5));
  std::ostringstream os;
  sol.write_csv(os);
  const std::string text = os.str();
  CHECK(text.rfind("x,u\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 6);
}
