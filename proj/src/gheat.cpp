#include "gexp/gheat.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace gexp {

double g_operator(double a, const VolatilityBand& band) {
  return 0.5 * (band.var_hi() * std::max(a, 0.0) - band.var_lo() * std::max(-a, 0.0));
}

// ---------------------------------------------------------------------------
// Grid

Grid1D::Grid1D(double x_min, double x_max, int nx, DtPolicy dt_policy)
    : x_min_(x_min), x_max_(x_max), nx_(nx), dt_policy_(dt_policy) {
  if (!(x_min < x_max)) throw std::invalid_argument("grid needs x_min < x_max");
  if (nx < 3) throw std::invalid_argument("grid needs at least 3 nodes");
  if (auto* a = std::get_if<AutoCfl>(&dt_policy_)) {
    if (!(a->safety > 0.0 && a->safety <= 1.0)) {
      throw std::invalid_argument("CFL safety factor must lie in (0, 1]");
    }
  } else if (!(std::get<FixedDt>(dt_policy_).dt > 0.0)) {
    throw std::invalid_argument("fixed dt must be positive");
  }
}

Grid1D Grid1D::doubled() const {
  double centre = 0.5 * (x_min_ + x_max_);
  double half = x_max_ - x_min_;
  return Grid1D(centre - half, centre + half, 2 * nx_ - 1, dt_policy_);
}

Grid1D Grid1D::refined() const { return Grid1D(x_min_, x_max_, 2 * nx_ - 1, dt_policy_); }

Grid1D default_grid() { return Grid1D(-10.0, 10.0, 401); }

// ---------------------------------------------------------------------------
// Equation

Equation Equation::g_heat() { return Equation(EquationKind::GHeat, nullptr, "zero"); }

Equation Equation::qv_driven(RealFunction drift, std::string name) {
  return Equation(EquationKind::QvDriven, std::move(drift), std::move(name));
}

Equation Equation::time_driven(RealFunction drift, std::string name) {
  return Equation(EquationKind::TimeDriven, std::move(drift), std::move(name));
}

Equation Equation::of(const GsdeSpec& spec) {
  return spec.kind() == GsdeKind::QvDriven ? qv_driven(spec.drift_function(), spec.name())
                                           : time_driven(spec.drift_function(), spec.name());
}

std::string Equation::name() const {
  switch (kind_) {
    case EquationKind::GHeat:
      return "gheat";
    case EquationKind::QvDriven:
      return "qv(" + drift_name_ + ")";
    case EquationKind::TimeDriven:
      return "time(" + drift_name_ + ")";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Solution

double PdeSolution::at(double x) const {
  if (x < grid.x_min() || x > grid.x_max()) {
    throw std::out_of_range("evaluation point " + format_real(x) + " outside the grid");
  }
  double s = (x - grid.x_min()) / grid.dx();
  int j = std::min(static_cast<int>(s), grid.nx() - 2);
  double w = s - j;
  return (1.0 - w) * values[j] + w * values[j + 1];
}

void PdeSolution::write_csv(std::ostream& os) const {
  os << "x,u\n";
  char buf[64];
  for (int j = 0; j < grid.nx(); ++j) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", grid.x(j), values[j]);
    os << buf;
  }
}

// ---------------------------------------------------------------------------
// Scheme

namespace {

struct Stencil {
  std::vector<double> drift;
  std::vector<char> centered;
  int upwind_nodes = 0;
};

// Central differencing of the drift keeps the scheme monotone as long as the
// cell Peclet condition holds for the smallest admissible diffusion.
Stencil build_stencil(const Equation& eq, const VolatilityBand& band, const Grid1D& grid) {
  Stencil s;
  const int n = grid.nx();
  s.drift.resize(n);
  s.centered.assign(n, 0);
  const double dx = grid.dx();
  for (int j = 0; j < n; ++j) {
    double b = eq.drift(grid.x(j));
    if (!std::isfinite(b)) {
      throw std::runtime_error("drift is not finite at x=" + format_real(grid.x(j)));
    }
    s.drift[j] = b;
    if (j == 0 || j == n - 1) continue;
    bool centered = true;
    if (eq.kind() == EquationKind::QvDriven) centered = std::abs(b) * dx <= 1.0;
    if (eq.kind() == EquationKind::TimeDriven) centered = std::abs(b) * dx <= band.var_lo();
    s.centered[j] = centered ? 1 : 0;
    if (!centered) ++s.upwind_nodes;
  }
  return s;
}

double stable_dt(const Equation& eq, const VolatilityBand& band, const Grid1D& grid,
                 const Stencil& s) {
  const double dx = grid.dx();
  double denom = band.var_hi();
  for (double b : s.drift) {
    double d = band.var_hi();
    if (eq.kind() == EquationKind::QvDriven) d = band.var_hi() * (1.0 + std::abs(b) * dx);
    if (eq.kind() == EquationKind::TimeDriven) d = band.var_hi() + std::abs(b) * dx;
    denom = std::max(denom, d);
  }
  return dx * dx / denom;
}

class Marcher {
 public:
  Marcher(const Equation& eq, const VolatilityBand& band, const Grid1D& grid)
      : eq_(eq), band_(band), grid_(grid), stencil_(build_stencil(eq, band, grid)) {
    dt_max_ = stable_dt(eq, band, grid, stencil_);
    if (auto* a = std::get_if<AutoCfl>(&grid.dt_policy())) {
      dt_target_ = a->safety * dt_max_;
    } else {
      dt_target_ = std::get<FixedDt>(grid.dt_policy()).dt;
      if (dt_target_ > dt_max_ * (1.0 + 1e-12)) {
        throw std::invalid_argument("fixed dt " + format_real(dt_target_) +
                                    " violates the CFL bound " + format_real(dt_max_));
      }
    }
  }

  int upwind_nodes() const { return stencil_.upwind_nodes; }
  double dt_max() const { return dt_max_; }

  // Advances u over `duration`; returns the step actually used.
  double advance(std::vector<double>& u, double duration, long& steps_taken) {
    if (duration <= 0.0) return 0.0;
    long steps = static_cast<long>(std::ceil(duration / dt_target_ - 1e-9));
    steps = std::max(steps, 1L);
    const double dt = duration / steps;
    std::vector<double> next(u.size());
    for (long k = 0; k < steps; ++k) {
      step(u, next, dt);
      u.swap(next);
      ++steps_taken;
      for (std::size_t j = 0; j < u.size(); ++j) {
        if (!std::isfinite(u[j])) {
          throw std::runtime_error("non-finite PDE value at step " + std::to_string(steps_taken) +
                                   ", x=" + format_real(grid_.x(static_cast<int>(j))));
        }
      }
    }
    return dt;
  }

 private:
  double rhs(EquationKind kind, double b, double d1, double d2) const {
    switch (kind) {
      case EquationKind::GHeat:
        return g_operator(d2, band_);
      case EquationKind::QvDriven: {
        double q = b * d1 + 0.5 * d2;
        // tie q == 0 resolved toward the upper level; the flux is zero either way
        double v = q >= 0.0 ? band_.var_hi() : band_.var_lo();
        return v * q;
      }
      case EquationKind::TimeDriven:
        return b * d1 + g_operator(d2, band_);
    }
    return 0.0;
  }

  void step(const std::vector<double>& u, std::vector<double>& out, double dt) const {
    const int n = grid_.nx();
    const double dx = grid_.dx();
    const double inv_dx = 1.0 / dx;
    const double inv_dx2 = inv_dx * inv_dx;
    const EquationKind kind = eq_.kind();
    const auto& b = stencil_.drift;

    // zero-curvature boundaries; the drift only acts through inward stencils
    {
      double d1 = (kind != EquationKind::GHeat && b[0] > 0.0) ? (u[1] - u[0]) * inv_dx : 0.0;
      out[0] = u[0] + dt * rhs(kind, b[0], d1, 0.0);
      double dn = (kind != EquationKind::GHeat && b[n - 1] < 0.0)
                      ? (u[n - 1] - u[n - 2]) * inv_dx
                      : 0.0;
      out[n - 1] = u[n - 1] + dt * rhs(kind, b[n - 1], dn, 0.0);
    }
    for (int j = 1; j < n - 1; ++j) {
      double d2 = (u[j + 1] - 2.0 * u[j] + u[j - 1]) * inv_dx2;
      double d1 = 0.0;
      if (kind != EquationKind::GHeat) {
        if (stencil_.centered[j]) {
          d1 = 0.5 * (u[j + 1] - u[j - 1]) * inv_dx;
        } else if (b[j] > 0.0) {
          d1 = (u[j + 1] - u[j]) * inv_dx;
        } else {
          d1 = (u[j] - u[j - 1]) * inv_dx;
        }
      }
      out[j] = u[j] + dt * rhs(kind, b[j], d1, d2);
    }
  }

  const Equation& eq_;
  const VolatilityBand& band_;
  const Grid1D& grid_;
  Stencil stencil_;
  double dt_max_ = 0.0;
  double dt_target_ = 0.0;
};

std::vector<double> initial_values(const TestFunction& payoff, const Grid1D& grid) {
  std::vector<double> u(grid.nx());
  for (int j = 0; j < grid.nx(); ++j) {
    u[j] = payoff(grid.x(j));
    if (!std::isfinite(u[j])) {
      throw std::invalid_argument("payoff '" + payoff.id() + "' is not finite at x=" +
                                  format_real(grid.x(j)));
    }
  }
  return u;
}

}  // namespace

double max_stable_dt(const Equation& equation, const VolatilityBand& band, const Grid1D& grid) {
  Stencil s = build_stencil(equation, band, grid);
  return stable_dt(equation, band, grid, s);
}

std::vector<PdeSolution> solve_series(const Equation& equation, const TestFunction& payoff,
                                      const VolatilityBand& band, std::span<const double> horizons,
                                      const Grid1D& grid) {
  double previous = 0.0;
  for (double h : horizons) {
    if (!(h > previous)) {
      throw std::invalid_argument("horizons must be positive and strictly increasing");
    }
    previous = h;
  }
  Marcher marcher(equation, band, grid);
  std::vector<double> u = initial_values(payoff, grid);
  std::vector<PdeSolution> out;
  out.reserve(horizons.size());
  double t = 0.0;
  long steps = 0;
  double dt = 0.0;
  for (double h : horizons) {
    dt = marcher.advance(u, h - t, steps);
    t = h;
    SchemeMeta meta;
    meta.dt = dt;
    meta.steps = steps;
    meta.upwind_nodes = marcher.upwind_nodes();
    out.push_back(PdeSolution{grid, h, u, meta});
  }
  return out;
}

PdeSolution solve(const Equation& equation, const TestFunction& payoff, const VolatilityBand& band,
                  double horizon, const Grid1D& grid) {
  if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
  double h[] = {horizon};
  return std::move(solve_series(equation, payoff, band, h, grid).front());
}

Interval padded_interval(const Grid1D& grid, const VolatilityBand& band, double horizon) {
  double pad = 6.0 * band.sigma_hi() * std::sqrt(horizon);
  return {grid.x_min() + pad, grid.x_max() - pad};
}

namespace {

void require_padded(const Grid1D& grid, const VolatilityBand& band, double horizon, double x) {
  Interval safe = padded_interval(grid, band, horizon);
  if (x < safe.lo || x > safe.hi) {
    throw std::out_of_range("x=" + format_real(x) + " lies in the boundary-contaminated zone; "
                            "safe interval is [" + format_real(safe.lo) + ", " +
                            format_real(safe.hi) + "]");
  }
}

}  // namespace

double pbar_pde(const GsdeSpec& spec, const TestFunction& payoff, double x, double horizon,
                const VolatilityBand& band, const Grid1D& grid) {
  require_padded(grid, band, horizon, x);
  return solve(Equation::of(spec), payoff, band, horizon, grid).at(x);
}

double truncation_change(const GsdeSpec& spec, const TestFunction& payoff, double x,
                         double horizon, const VolatilityBand& band, const Grid1D& grid) {
  double base = pbar_pde(spec, payoff, x, horizon, band, grid);
  double wide = pbar_pde(spec, payoff, x, horizon, band, grid.doubled());
  return std::abs(wide - base);
}

// ---------------------------------------------------------------------------
// Axioms

std::vector<AxiomCheck> check_axioms_pde(const Equation& equation, const VolatilityBand& band,
                                         double horizon, const Grid1D& grid,
                                         std::span<const TestFunction> payoffs, double tolerance) {
  Interval safe = padded_interval(grid, band, horizon);
  std::vector<int> nodes;
  for (int j = 0; j < grid.nx(); ++j) {
    if (grid.x(j) >= safe.lo && grid.x(j) <= safe.hi) nodes.push_back(j);
  }
  if (nodes.empty()) throw std::invalid_argument("grid has no nodes outside the padding zone");

  auto run = [&](const TestFunction& f) { return solve(equation, f, band, horizon, grid).values; };
  auto scale_of = [&](const std::vector<double>& u, int j) { return std::max(1.0, std::abs(u[j])); };

  std::vector<std::vector<double>> base;
  base.reserve(payoffs.size());
  for (const auto& f : payoffs) base.push_back(run(f));

  std::vector<AxiomCheck> out;
  const std::string tag = equation.name() + " band=(" + format_real(band.sigma_lo()) + "," +
                          format_real(band.sigma_hi()) + ") T=" + format_real(horizon);

  // (a) monotonicity: f >= 0.5 f, f >= f - 0.1, f >= min(f, sigmoid)
  for (std::size_t i = 0; i < payoffs.size(); ++i) {
    const auto& f = payoffs[i];
    auto sig = catalog::sigmoid();
    TestFunction lower_min(f.id() + "^sigmoid",
                           [f, sig](double x) { return std::min(f(x), sig(x)); }, f.positive(),
                           Convexity::Neither, f.bound());
    for (const auto& g : {f.scaled(0.5), f.plus_constant(-0.1), lower_min}) {
      bool dominated = true;  // only meaningful when f >= g on the grid
      for (int j = 0; j < grid.nx(); ++j) dominated &= f(grid.x(j)) >= g(grid.x(j));
      if (!dominated) continue;
      auto ug = run(g);
      AxiomCheck c{"monotonicity", "pde", tag + " f=" + f.id() + " g=" + g.id(), 0.0, tolerance,
                   true};
      for (int j : nodes) {
        c.worst_violation = std::max(c.worst_violation, (ug[j] - base[i][j]) / scale_of(base[i], j));
      }
      c.pass = c.worst_violation <= tolerance;
      out.push_back(c);
    }
  }

  // (b) constant preservation
  for (double cst : {1.0, 2.5, -0.5}) {
    auto u = run(catalog::constant(cst));
    AxiomCheck c{"constant", "pde", tag + " c=" + format_real(cst), 0.0, tolerance, true};
    for (int j : nodes) c.worst_violation = std::max(c.worst_violation, std::abs(u[j] - cst));
    c.pass = c.worst_violation <= tolerance;
    out.push_back(c);
  }

  // (c) sub-additivity over all pairs
  for (std::size_t i = 0; i < payoffs.size(); ++i) {
    for (std::size_t k = i; k < payoffs.size(); ++k) {
      auto u = run(TestFunction::sum(payoffs[i], payoffs[k]));
      AxiomCheck c{"subadditivity", "pde", tag + " f=" + payoffs[i].id() + " g=" + payoffs[k].id(),
                   0.0, tolerance, true};
      for (int j : nodes) {
        double excess = u[j] - base[i][j] - base[k][j];
        double scale = std::max({1.0, std::abs(base[i][j]), std::abs(base[k][j])});
        c.worst_violation = std::max(c.worst_violation, excess / scale);
      }
      c.pass = c.worst_violation <= tolerance;
      out.push_back(c);
    }
  }

  // (d) positive homogeneity
  for (std::size_t i = 0; i < payoffs.size(); ++i) {
    for (double lambda : {0.0, 0.5, 3.0}) {
      auto u = run(payoffs[i].scaled(lambda));
      AxiomCheck c{"homogeneity", "pde", tag + " f=" + payoffs[i].id() + " lambda=" +
                                             format_real(lambda),
                   0.0, tolerance, true};
      for (int j : nodes) {
        double scale = std::max(1.0, std::abs(lambda * base[i][j]));
        c.worst_violation = std::max(c.worst_violation, std::abs(u[j] - lambda * base[i][j]) / scale);
      }
      c.pass = c.worst_violation <= tolerance;
      out.push_back(c);
    }
  }
  return out;
}

}  // namespace gexp
