#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "gexp/harnack.hpp"
#include "oracles.hpp"

using namespace gexp;

TEST_CASE("Harnack exponent against high-precision arithmetic") {
  const VolatilityBand unit(1.0, 1.0);
  const double want = 2.0 / (1.0 - std::exp(-2.0));
  CHECK(std::abs(harnack_exponent(2.0, 1.0, unit, 1.0, 1.0) - want) < 1e-9);
  CHECK(std::abs(harnack_exponent(2.0, 1.0, unit, 1.0, 1.0) -
                 static_cast<double>(oracle::harnack_exponent(2.0, 1.0, 1.0, 1.0, 1.0, 1.0))) <
        1e-12);
  for (double p : {1.5, 4.0}) {
    for (double t : {0.5, 1.0}) {
      const double ref = static_cast<double>(oracle::harnack_exponent(p, 1.3, 0.5, 1.0, t, 0.6));
      CHECK(harnack_exponent(p, 1.3, VolatilityBand(0.5, 1.0), t, 0.6) ==
            doctest::Approx(ref).epsilon(1e-13));
      CHECK(harnack_exponent(p, 1.3, VolatilityBand(0.5, 1.0), t, 0.6, ExponentForm::Holder) ==
            doctest::Approx((p - 1.0) * ref).epsilon(1e-13));
    }
  }
  CHECK(std::abs(harnack_exponent(2.0, 1.0, unit, 50.0, 1.0) - 2.0) < 1e-6);
  CHECK(harnack_exponent(2.0, 1.0, unit, 1.0, 0.0) == 0.0);
  CHECK_THROWS_AS(harnack_exponent(1.0, 1.0, unit, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(harnack_exponent(2.0, 0.0, unit, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("shift-Harnack exponent") {
  CHECK(std::abs(shift_harnack_exponent(2.0, 1.0, 1.0, 1.0, 1.0) - 7.0 / 3.0) < 1e-12);
  const double ref = static_cast<double>(oracle::shift_harnack_exponent(1.5, 0.7, 0.5, 0.5, 0.4));
  CHECK(shift_harnack_exponent(1.5, 0.7, 0.5, 0.5, 0.4) == doctest::Approx(ref).epsilon(1e-14));
  CHECK(shift_harnack_exponent(2.0, 0.0, 1.0, 1.0, 1.0) == doctest::Approx(1.0));
}

TEST_CASE("exponent form names") {
  CHECK(to_string(ExponentForm::Printed) == "printed");
  CHECK(exponent_form_from_string("holder") == ExponentForm::Holder);
  CHECK_THROWS_AS(exponent_form_from_string("x"), std::invalid_argument);
}

TEST_CASE("certificates require the matching equation kind") {
  const VolatilityBand band(0.5, 1.0);
  CHECK_THROWS_AS(verify_harnack(GsdeSpec::ou(GsdeKind::TimeDriven), catalog::sigmoid(), 0.0,
                                 0.5, 2.0, 1.0, band),
                  std::invalid_argument);
  CHECK_THROWS_AS(verify_shift_harnack(GsdeSpec::ou(GsdeKind::QvDriven), catalog::sigmoid(), 0.0,
                                       0.5, 2.0, 1.0, band),
                  std::invalid_argument);
  CHECK_THROWS_AS(verify_harnack(GsdeSpec::ou(GsdeKind::QvDriven),
                                 catalog::sigmoid().negated(), 0.0, 0.5, 2.0, 1.0, band),
                  std::invalid_argument);
}

TEST_CASE("single certificates agree with the grid") {
  const VolatilityBand band(0.5, 1.0);
  auto spec = GsdeSpec::tanh(1.0, GsdeKind::QvDriven);
  auto c = verify_harnack(spec, catalog::lorentzian(), 0.0, 0.7, 1.5, 0.5, band);
  CHECK(c.pass);
  CHECK(c.margin() >= 0.0);
  CertificateSweep sweep;
  sweep.payoffs = {catalog::lorentzian()};
  sweep.ps = {1.5};
  sweep.horizons = {0.5};
  sweep.offsets = {0.7};
  sweep.include_swapped = false;
  auto grid = harnack_grid(spec, band, sweep);
  REQUIRE(grid.size() == 1);
  CHECK(grid[0].lhs == doctest::Approx(c.lhs).epsilon(1e-14));
  CHECK(grid[0].rhs == doctest::Approx(c.rhs).epsilon(1e-14));
}

TEST_CASE("certificate grids pass for the printed shift form and the Holder form") {
  CertificateSweep sweep;
  sweep.payoffs = catalog::all();
  sweep.offsets = linspace(0.0, 1.0, 5);
  for (const auto& band : {VolatilityBand(1.0, 1.0), VolatilityBand(0.5, 1.0)}) {
    BackendConfig cfg;
    cfg.exponent_form = ExponentForm::Holder;
    auto h = harnack_grid(GsdeSpec::ou(GsdeKind::QvDriven), band, sweep, cfg);
    // d = 0 has no distinct swapped pair
    CHECK(h.size() == 5 * 3 * 2 * (5 + 4));
    CHECK(count_failures(h) == 0);
    auto s = shift_harnack_grid(GsdeSpec::tanh(1.0, GsdeKind::TimeDriven), band, sweep);
    CHECK(count_failures(s) == 0);
  }
}

TEST_CASE("Monte Carlo certificates are advisory but usable") {
  BackendConfig cfg;
  cfg.method = Backend::Mc;
  cfg.mc.n_paths = 4000;
  cfg.mc.n_steps = 64;
  auto c = verify_harnack(GsdeSpec::ou(GsdeKind::QvDriven), catalog::sigmoid(), 0.0, 0.5, 2.0,
                          1.0, VolatilityBand(0.5, 1.0), cfg);
  CHECK(c.method == Backend::Mc);
  CHECK(c.tolerance_budget > 0.0);
  CHECK(c.pass);
}

TEST_CASE("step payoff is smoothed by the semigroup") {
  auto probe = strong_feller_probe(GsdeSpec::ou(GsdeKind::QvDriven), VolatilityBand(0.5, 1.0),
                                   0.5, Grid1D(-6.0, 6.0, 121));
  CHECK(probe.rows.size() == 3);
  CHECK(probe.pass);
}

TEST_CASE("linspace") {
  auto v = linspace(0.0, 1.0, 11);
  REQUIRE(v.size() == 11);
  CHECK(v.front() == 0.0);
  CHECK(v.back() == 1.0);
  CHECK(v[3] == doctest::Approx(0.3));
}
