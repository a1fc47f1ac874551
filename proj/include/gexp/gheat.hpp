// Monotone explicit finite differences for the fully nonlinear equations
// behind the sublinear expectation: the G-heat equation u_t = G(u_xx) and the
// HJB equations of the two G-SDE kinds.
//
// Orientation is forward: u(0, .) is the payoff and u(T, x) = P_T f(x).
#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "gexp/core.hpp"

namespace gexp {

/// 1-D G function: G(a) = (sigma_hi^2 a^+ - sigma_lo^2 a^-) / 2.
double g_operator(double a, const VolatilityBand& band);

/// Relative tolerance attached to PDE-backend values.
inline constexpr double kPdeRelTolerance = 2e-3;

struct AutoCfl {
  double safety = 0.9;
};
struct FixedDt {
  double dt;
};
using DtPolicy = std::variant<AutoCfl, FixedDt>;

class Grid1D {
 public:
  Grid1D(double x_min, double x_max, int nx, DtPolicy dt_policy = AutoCfl{});

  double x_min() const { return x_min_; }
  double x_max() const { return x_max_; }
  int nx() const { return nx_; }
  double dx() const { return (x_max_ - x_min_) / (nx_ - 1); }
  double x(int j) const { return j == nx_ - 1 ? x_max_ : x_min_ + j * dx(); }
  const DtPolicy& dt_policy() const { return dt_policy_; }

  /// Same spacing, twice the width, same centre.
  Grid1D doubled() const;
  /// Half the spacing on the same domain.
  Grid1D refined() const;

 private:
  double x_min_;
  double x_max_;
  int nx_;
  DtPolicy dt_policy_;
};

/// Default desk-scale grid: [-10, 10] with 401 nodes.
Grid1D default_grid();

enum class EquationKind { GHeat, QvDriven, TimeDriven };

/// Which nonlinear equation to march.
class Equation {
 public:
  static Equation g_heat();
  static Equation qv_driven(RealFunction drift, std::string name = "custom");
  static Equation time_driven(RealFunction drift, std::string name = "custom");
  static Equation of(const GsdeSpec& spec);

  EquationKind kind() const { return kind_; }
  double drift(double x) const { return drift_ ? drift_(x) : 0.0; }
  std::string name() const;

 private:
  Equation(EquationKind kind, RealFunction drift, std::string drift_name)
      : kind_(kind), drift_(std::move(drift)), drift_name_(std::move(drift_name)) {}

  EquationKind kind_;
  RealFunction drift_;
  std::string drift_name_;
};

struct SchemeMeta {
  double dt = 0.0;
  long steps = 0;
  std::string boundary = "zero-curvature";
  int upwind_nodes = 0;  // nodes where the drift needed a one-sided difference
};

struct PdeSolution {
  Grid1D grid;
  double horizon = 0.0;
  std::vector<double> values;  // u(horizon, x_j)
  SchemeMeta meta;

  /// Linear interpolation of the nodal values; throws outside the grid.
  double at(double x) const;
  /// CSV with header "x,u".
  void write_csv(std::ostream& os) const;
};

/// Marches u(0,.) = payoff to u(horizon,.).
PdeSolution solve(const Equation& equation, const TestFunction& payoff,
                  const VolatilityBand& band, double horizon, const Grid1D& grid);

/// Solutions at several increasing horizons from a single march.
std::vector<PdeSolution> solve_series(const Equation& equation, const TestFunction& payoff,
                                      const VolatilityBand& band, std::span<const double> horizons,
                                      const Grid1D& grid);

/// Largest stable explicit step for the equation on the grid.
double max_stable_dt(const Equation& equation, const VolatilityBand& band, const Grid1D& grid);

/// Inner interval of the grid not contaminated by the artificial boundary.
struct Interval {
  double lo;
  double hi;
};
Interval padded_interval(const Grid1D& grid, const VolatilityBand& band, double horizon);

/// P_T f(x) for the G-SDE via the PDE. Throws std::out_of_range when x lies in
/// the boundary-contaminated zone.
double pbar_pde(const GsdeSpec& spec, const TestFunction& payoff, double x, double horizon,
                const VolatilityBand& band, const Grid1D& grid);

/// |pbar_pde on the doubled domain - pbar_pde| at x.
double truncation_change(const GsdeSpec& spec, const TestFunction& payoff, double x,
                         double horizon, const VolatilityBand& band, const Grid1D& grid);

/// Sublinear-expectation axioms for the PDE semigroup over the given
/// payoffs, evaluated on all nodes of the padded interval.
std::vector<AxiomCheck> check_axioms_pde(const Equation& equation, const VolatilityBand& band,
                                         double horizon, const Grid1D& grid,
                                         std::span<const TestFunction> payoffs,
                                         double tolerance = kPdeRelTolerance);

}  // namespace gexp
