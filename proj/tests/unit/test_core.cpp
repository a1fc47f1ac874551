#include <doctest.h>

#include <cmath>
#include <set>
#include <stdexcept>

#include "gexp/core.hpp"

using namespace gexp;

TEST_CASE("volatility band validates its ends") {
  CHECK_THROWS_AS(VolatilityBand(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(VolatilityBand(1.0, 0.5), std::invalid_argument);
  VolatilityBand b(0.5, 1.0);
  CHECK(b.var_lo() == doctest::Approx(0.25));
  CHECK(b.var_hi() == doctest::Approx(1.0));
  CHECK_FALSE(b.degenerate());
  CHECK(VolatilityBand(1.0, 1.0).degenerate());
}

TEST_CASE("scenario quadratic variation is piecewise linear") {
  VolatilityBand band(0.5, 1.0);
  Scenario s({0.0, 0.5, 1.0}, {0.25, 1.0}, band);
  CHECK(s.qv_at(0.0) == 0.0);
  CHECK(s.qv_at(0.25) == doctest::Approx(0.0625));
  CHECK(s.qv_at(0.5) == doctest::Approx(0.125));
  CHECK(s.qv_at(1.0) == doctest::Approx(0.625));
  CHECK(s.level_at(0.75) == 1.0);
  CHECK_FALSE(s.is_constant());
  CHECK_THROWS_AS(s.qv_at(1.5), std::out_of_range);
  CHECK_THROWS_AS(Scenario({0.0, 1.0}, {2.0}, band), std::invalid_argument);
  CHECK_THROWS_AS(Scenario({0.1, 1.0}, {0.5}, band), std::invalid_argument);
}

TEST_CASE("scenario lattice enumerates levels^pieces distinct scenarios") {
  VolatilityBand band(0.5, 1.0);
  auto lattice = make_scenario_lattice(band, 1.0, 2, 3);
  CHECK(lattice.size() == 9);
  std::set<std::string> ids;
  for (const auto& s : lattice) {
    ids.insert(s.id());
    for (double v : s.levels()) {
      CHECK(v >= band.var_lo());
      CHECK(v <= band.var_hi());
    }
  }
  CHECK(ids.size() == 9);
  CHECK(make_scenario_lattice(VolatilityBand(1.0, 1.0), 1.0, 2, 3).size() == 1);
  CHECK_THROWS_AS(make_scenario_lattice(band, 1.0, 2, 1), std::invalid_argument);
  CHECK_THROWS_AS(make_scenario_lattice(band, 1.0, 20, 3), std::invalid_argument);
}

TEST_CASE("drift specs carry their Lipschitz constant") {
  auto ou = GsdeSpec::ou(GsdeKind::QvDriven);
  CHECK(ou.lipschitz_k() == 1.0);
  CHECK(ou.drift(2.0) == -2.0);
  auto t = GsdeSpec::tanh(1.5, GsdeKind::TimeDriven);
  CHECK(t.lipschitz_k() == 1.5);
  CHECK(t.kind() == GsdeKind::TimeDriven);
  CHECK(t.drift(0.3) == doctest::Approx(-1.5 * std::tanh(0.3)));
  CHECK(ou.with_lipschitz(2.0).lipschitz_k() == 2.0);
  CHECK_THROWS_AS(GsdeSpec([](double x) { return 3.0 * x; }, 1.0, GsdeKind::QvDriven),
                  std::invalid_argument);
}

TEST_CASE("catalog payoffs") {
  auto all = catalog::all();
  REQUIRE(all.size() == catalog::ids().size());
  for (std::size_t i = 0; i < all.size(); ++i) {
    CHECK(all[i].id() == catalog::ids()[i]);
    CHECK(catalog::by_id(all[i].id()).id() == all[i].id());
    CHECK(all[i].positive());
    for (double x : {-30.0, -1.0, 0.0, 0.7, 30.0}) {
      CHECK(all[i](x) >= 0.0);
      CHECK(all[i](x) <= all[i].bound());
    }
  }
  CHECK_THROWS_AS(catalog::by_id("nope"), std::invalid_argument);
  auto sq = catalog::clipped_square();
  CHECK(sq(3.0) == 9.0);
  CHECK(sq(100.0) == 400.0);
  CHECK(sq.power(2.0)(3.0) == doctest::Approx(81.0));
  CHECK(sq.shifted(1.0)(2.0) == doctest::Approx(9.0));
  CHECK(sq.negated()(3.0) == -9.0);
  CHECK_FALSE(sq.negated().positive());
  CHECK_THROWS_AS(sq.negated().power(2.0), std::invalid_argument);
  auto ind = catalog::smoothed_indicator();
  CHECK(ind(0.0) > 0.95);
  CHECK(ind(5.0) < 1e-6);
  CHECK(ind(-1.0) == doctest::Approx(0.5).epsilon(1e-3));
}

TEST_CASE("Monte Carlo configuration validation") {
  McConfig mc;
  CHECK_NOTHROW(mc.validate());
  mc.n_steps = 100;
  CHECK_THROWS_AS(mc.validate(), std::invalid_argument);
  mc.n_steps = 128;
  mc.n_paths = 0;
  CHECK_THROWS_AS(mc.validate(), std::invalid_argument);
}
