// Domain types shared by every gexp module: the volatility band, the
// piecewise-constant scenario class, G-SDE specifications and the bounded
// test-function catalog.
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace gexp {

/// Uncertainty interval [sigma_lo, sigma_hi] for the volatility of the
/// driving G-Brownian motion. Its squares bound the quadratic-variation rate.
class VolatilityBand {
 public:
  VolatilityBand(double sigma_lo, double sigma_hi);

  double sigma_lo() const { return sigma_lo_; }
  double sigma_hi() const { return sigma_hi_; }
  double var_lo() const { return sigma_lo_ * sigma_lo_; }
  double var_hi() const { return sigma_hi_ * sigma_hi_; }
  bool degenerate() const { return sigma_lo_ == sigma_hi_; }

  bool operator==(const VolatilityBand&) const = default;

 private:
  double sigma_lo_;
  double sigma_hi_;
};

/// One volatility scenario: a squared-volatility control that is constant on
/// each interval [t_{i}, t_{i+1}) of a partition of [0, T]. The induced
/// quadratic variation qv(t) is piecewise linear and known in closed form.
class Scenario {
 public:
  Scenario(std::vector<double> breakpoints, std::vector<double> levels,
           const VolatilityBand& band);

  static Scenario constant(double level, double horizon, const VolatilityBand& band);

  double horizon() const { return breakpoints_.back(); }
  const VolatilityBand& band() const { return band_; }
  std::span<const double> breakpoints() const { return breakpoints_; }
  std::span<const double> levels() const { return levels_; }

  /// Squared volatility in force at time t (right-continuous).
  double level_at(double t) const;
  /// Quadratic variation accumulated on [0, t].
  double qv_at(double t) const;
  bool is_constant() const;
  /// Stable human-readable identifier, e.g. "v[0.25,1]".
  std::string id() const;

 private:
  std::vector<double> breakpoints_;
  std::vector<double> levels_;
  std::vector<double> qv_nodes_;  // qv at each breakpoint
  VolatilityBand band_;
};

double qv_at(const Scenario& scenario, double t);

/// Guard against combinatorial blow-up in make_scenario_lattice.
inline constexpr std::size_t kDefaultLatticeCap = 4096;

/// All levels^pieces piecewise-constant controls on a uniform partition of
/// [0, horizon] with values on a uniform grid of [sigma_lo^2, sigma_hi^2].
/// A degenerate band collapses to the single constant scenario.
std::vector<Scenario> make_scenario_lattice(const VolatilityBand& band, double horizon,
                                            int pieces, int levels,
                                            std::size_t cap = kDefaultLatticeCap);

enum class GsdeKind {
  QvDriven,    // dX = b(X) d<B> + dB
  TimeDriven,  // dX = b(X) dt + dB
};

const char* to_string(GsdeKind kind);

/// Shortest "%g"-style rendering used in identifiers and CSV output.
std::string format_real(double value);

using RealFunction = std::function<double(double)>;

/// Drift, declared Lipschitz constant and equation kind of a one-dimensional
/// G-SDE. The declared constant is spot-checked on a sample grid.
class GsdeSpec {
 public:
  GsdeSpec(RealFunction drift, double lipschitz_k, GsdeKind kind, std::string name = "custom");

  static GsdeSpec zero(GsdeKind kind);
  static GsdeSpec constant(double c, GsdeKind kind);
  /// b(x) = -x.
  static GsdeSpec ou(GsdeKind kind);
  /// b(x) = -k tanh(x).
  static GsdeSpec tanh(double k, GsdeKind kind);

  double drift(double x) const { return drift_(x); }
  const RealFunction& drift_function() const { return drift_; }
  double lipschitz_k() const { return lipschitz_k_; }
  GsdeKind kind() const { return kind_; }
  const std::string& name() const { return name_; }

  GsdeSpec with_kind(GsdeKind kind) const;
  GsdeSpec with_lipschitz(double k) const;

 private:
  RealFunction drift_;
  double lipschitz_k_;
  GsdeKind kind_;
  std::string name_;
};

enum class Convexity { Convex, Concave, Neither };

/// Bounded payoff with known sup-norm. Harnack-type checks require positive
/// members; algebraic combinators keep the metadata consistent.
class TestFunction {
 public:
  TestFunction(std::string id, RealFunction eval, bool positive, Convexity convexity,
               double bound);

  double operator()(double x) const { return eval_(x); }
  const std::string& id() const { return id_; }
  bool positive() const { return positive_; }
  Convexity convexity() const { return convexity_; }
  double bound() const { return bound_; }

  /// Pointwise power f^p (requires a positive function).
  TestFunction power(double p) const;
  /// x -> f(shift + x).
  TestFunction shifted(double shift) const;
  TestFunction scaled(double factor) const;
  TestFunction negated() const;
  TestFunction plus_constant(double c) const;
  static TestFunction sum(const TestFunction& a, const TestFunction& b);

 private:
  std::string id_;
  RealFunction eval_;
  bool positive_;
  Convexity convexity_;
  double bound_;
};

namespace catalog {

TestFunction constant(double c = 1.0);
/// 1 / (1 + e^{-x})
TestFunction sigmoid();
/// 1 / (1 + x^2)
TestFunction lorentzian();
/// Logistic-smoothed indicator of [a, b] with transition width `width`.
TestFunction smoothed_indicator(double a = -1.0, double b = 1.0, double width = 0.25);
/// min(x^2, cap); the default cap sits far outside the usual [-10, 10] domain.
TestFunction clipped_square(double cap = 400.0);

/// The five catalog payoffs in a fixed order.
std::vector<TestFunction> all();
/// Lookup by id ("one", "sigmoid", "lorentzian", "smooth-indicator",
/// "clipped-x2"); throws std::invalid_argument for unknown ids.
TestFunction by_id(const std::string& id);
std::vector<std::string> ids();

}  // namespace catalog

/// Monte Carlo settings shared by the simulation-based modules.
struct McConfig {
  std::size_t n_paths = 10000;
  std::size_t n_steps = 256;
  std::uint64_t seed = 20240601;
  double epsilon0 = 0.5;

  /// Throws std::invalid_argument unless n_paths > 0, n_steps is a power of
  /// two and epsilon0 > 0.
  void validate() const;
};

/// Result line of one sublinear-expectation axiom check.
struct AxiomCheck {
  std::string axiom;    // monotonicity | constant | subadditivity | homogeneity
  std::string backend;  // pde | mc
  std::string detail;   // payoffs / parameters involved
  double worst_violation = 0.0;
  double tolerance = 0.0;
  bool pass = true;
};

}  // namespace gexp
