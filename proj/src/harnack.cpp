#include "gexp/harnack.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gexp/simulate.hpp"

namespace gexp {

std::string to_string(ExponentForm form) {
  return form == ExponentForm::Printed ? "printed" : "holder";
}

ExponentForm exponent_form_from_string(const std::string& s) {
  if (s == "printed") return ExponentForm::Printed;
  if (s == "holder") return ExponentForm::Holder;
  throw std::invalid_argument("unknown exponent form '" + s + "' (printed | holder)");
}

double harnack_exponent(double p, double k, const VolatilityBand& band, double horizon,
                        double dist, ExponentForm form) {
  if (!(p > 1.0)) throw std::invalid_argument("Harnack exponent needs p > 1");
  if (!(k > 0.0)) throw std::invalid_argument("Harnack exponent needs K > 0");
  if (!(horizon > 0.0)) throw std::invalid_argument("Harnack exponent needs T > 0");
  const double lo2 = band.var_lo(), hi2 = band.var_hi();
  const double num = p * k * hi2 * hi2 * -std::expm1(-2.0 * lo2 * k * horizon);
  const double den_root = -std::expm1(-2.0 * hi2 * k * horizon);
  const double den = (p - 1.0) * (p - 1.0) * lo2 * lo2 * lo2 * den_root * den_root;
  const double printed = num / den * dist * dist;
  return form == ExponentForm::Printed ? printed : (p - 1.0) * printed;
}

double shift_harnack_exponent(double p, double k, double sigma_lo, double horizon, double v) {
  if (!(p > 1.0)) throw std::invalid_argument("shift-Harnack exponent needs p > 1");
  if (!(horizon > 0.0)) throw std::invalid_argument("shift-Harnack exponent needs T > 0");
  if (!(sigma_lo > 0.0)) throw std::invalid_argument("shift-Harnack exponent needs sigma_lo > 0");
  if (!(k >= 0.0)) throw std::invalid_argument("shift-Harnack exponent needs K >= 0");
  return p * v * v / (2.0 * sigma_lo * sigma_lo * (p - 1.0)) *
         (1.0 / horizon + k + k * k * horizon / 3.0);
}

std::string to_string(HarnackKind kind) {
  return kind == HarnackKind::Harnack ? "harnack" : "shift-harnack";
}

std::string to_string(Backend backend) { return backend == Backend::Pde ? "pde" : "mc"; }

namespace {

void require_inputs(const TestFunction& payoff, double p) {
  if (!payoff.positive()) {
    throw std::invalid_argument("payoff " + payoff.id() + " is not nonnegative");
  }
  if (!(p > 1.0)) throw std::invalid_argument("p must exceed 1");
}

void require_kind(const GsdeSpec& spec, GsdeKind kind) {
  if (spec.kind() != kind) {
    throw std::invalid_argument("spec " + spec.name() + " has kind " + to_string(spec.kind()) +
                                ", expected " + to_string(kind));
  }
}

double pde_value(const PdeSolution& sol, const VolatilityBand& band, double x) {
  Interval safe = padded_interval(sol.grid, band, sol.horizon);
  if (x < safe.lo || x > safe.hi) {
    throw std::out_of_range("x=" + format_real(x) + " lies in the boundary-contaminated zone");
  }
  return sol.at(x);
}

struct McValue {
  double value;
  double se;
};

McValue mc_value(const GsdeSpec& spec, const TestFunction& f, double x, double horizon,
                 const VolatilityBand& band, const BackendConfig& cfg) {
  auto scenarios = make_scenario_lattice(band, horizon, cfg.pieces, cfg.levels);
  auto est = pbar_mc(spec, f, x, horizon, scenarios, cfg.mc, cfg.exec);
  return {est.value, est.argmax_std_error()};
}

HarnackCertificate finish(HarnackCertificate c) {
  c.rhs *= std::exp(c.exponent);
  c.pass = c.lhs <= c.rhs * (1.0 + c.tolerance_budget);
  return c;
}

// MC budget: 3 combined standard errors of lhs - rhs, relative to rhs.
double mc_budget(double base, double base_se, double p, double rhs_raw, double rhs_se,
                 double exponent) {
  double lhs_se = p * std::pow(base, p - 1.0) * base_se;
  double scaled_rhs_se = rhs_se * std::exp(exponent);
  double rhs = rhs_raw * std::exp(exponent);
  return rhs > 0.0 ? 3.0 * std::hypot(lhs_se, scaled_rhs_se) / rhs : 0.0;
}

HarnackCertificate base_cert(HarnackKind kind, const GsdeSpec& spec, const VolatilityBand& band,
                             const TestFunction& payoff, double p, double horizon,
                             const BackendConfig& cfg) {
  HarnackCertificate c;
  c.kind = kind;
  c.drift = spec.name();
  c.band = band;
  c.p = p;
  c.horizon = horizon;
  c.payoff_id = payoff.id();
  c.method = cfg.method;
  return c;
}

}  // namespace

HarnackCertificate verify_harnack(const GsdeSpec& spec, const TestFunction& payoff, double x,
                                  double y, double p, double horizon, const VolatilityBand& band,
                                  const BackendConfig& cfg) {
  require_kind(spec, GsdeKind::QvDriven);
  require_inputs(payoff, p);
  HarnackCertificate c = base_cert(HarnackKind::Harnack, spec, band, payoff, p, horizon, cfg);
  c.x = x;
  c.y = y;
  c.exponent = harnack_exponent(p, spec.lipschitz_k(), band, horizon, std::abs(x - y),
                                cfg.exponent_form);
  c.exponent_form = cfg.exponent_form;
  const TestFunction fp = payoff.power(p);
  if (cfg.method == Backend::Pde) {
    const Equation eq = Equation::of(spec);
    double base = pde_value(solve(eq, payoff, band, horizon, cfg.grid), band, y);
    c.lhs = std::pow(base, p);
    c.rhs = pde_value(solve(eq, fp, band, horizon, cfg.grid), band, x);
    c.tolerance_budget = cfg.tolerance;
  } else {
    McValue base = mc_value(spec, payoff, y, horizon, band, cfg);
    McValue power = mc_value(spec, fp, x, horizon, band, cfg);
    c.lhs = std::pow(base.value, p);
    c.rhs = power.value;
    c.tolerance_budget = mc_budget(base.value, base.se, p, power.value, power.se, c.exponent);
  }
  return finish(c);
}

HarnackCertificate verify_shift_harnack(const GsdeSpec& spec, const TestFunction& payoff,
                                        double x, double v, double p, double horizon,
                                        const VolatilityBand& band, const BackendConfig& cfg) {
  require_kind(spec, GsdeKind::TimeDriven);
  require_inputs(payoff, p);
  HarnackCertificate c =
      base_cert(HarnackKind::ShiftHarnack, spec, band, payoff, p, horizon, cfg);
  c.x = x;
  c.y = x;
  c.shift = v;
  c.exponent = shift_harnack_exponent(p, spec.lipschitz_k(), band.sigma_lo(), horizon, v);
  const TestFunction fp = payoff.power(p).shifted(v);
  if (cfg.method == Backend::Pde) {
    const Equation eq = Equation::of(spec);
    double base = pde_value(solve(eq, payoff, band, horizon, cfg.grid), band, x);
    c.lhs = std::pow(base, p);
    c.rhs = pde_value(solve(eq, fp, band, horizon, cfg.grid), band, x);
    c.tolerance_budget = cfg.tolerance;
  } else {
    McValue base = mc_value(spec, payoff, x, horizon, band, cfg);
    McValue power = mc_value(spec, fp, x, horizon, band, cfg);
    c.lhs = std::pow(base.value, p);
    c.rhs = power.value;
    c.tolerance_budget = mc_budget(base.value, base.se, p, power.value, power.se, c.exponent);
  }
  return finish(c);
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  if (n == 0) return {};
  if (n == 1) return {lo};
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  out.back() = hi;
  return out;
}

namespace {

struct SweepTask {
  const TestFunction* payoff;
  double horizon;
};

std::vector<SweepTask> sweep_tasks(const CertificateSweep& sweep) {
  std::vector<SweepTask> tasks;
  for (const auto& f : sweep.payoffs) {
    for (double t : sweep.horizons) tasks.push_back({&f, t});
  }
  return tasks;
}

template <typename Fn>
std::vector<HarnackCertificate> run_tasks(const CertificateSweep& sweep, const Execution& exec,
                                          Fn&& fn) {
  auto tasks = sweep_tasks(sweep);
  auto parts = map_blocks<std::vector<HarnackCertificate>>(
      tasks.size(), 1, exec,
      [&](std::size_t i, std::size_t, std::size_t) { return fn(tasks[i]); });
  std::vector<HarnackCertificate> out;
  for (auto& part : parts) out.insert(out.end(), part.begin(), part.end());
  return out;
}

}  // namespace

std::vector<HarnackCertificate> harnack_grid(const GsdeSpec& spec, const VolatilityBand& band,
                                             const CertificateSweep& sweep,
                                             const BackendConfig& cfg) {
  require_kind(spec, GsdeKind::QvDriven);
  if (cfg.method == Backend::Mc) {
    std::vector<HarnackCertificate> out;
    for (const auto& f : sweep.payoffs)
      for (double t : sweep.horizons)
        for (double p : sweep.ps)
          for (double d : sweep.offsets) {
            out.push_back(verify_harnack(spec, f, sweep.x, sweep.x + d, p, t, band, cfg));
            if (sweep.include_swapped && d != 0.0) {
              out.push_back(verify_harnack(spec, f, sweep.x + d, sweep.x, p, t, band, cfg));
            }
          }
    return out;
  }
  // Parallelism lives at the task level; the solves themselves are serial.
  const Equation eq = Equation::of(spec);
  const double k = spec.lipschitz_k();
  return run_tasks(sweep, cfg.exec, [&](const SweepTask& task) {
    const TestFunction& f = *task.payoff;
    require_inputs(f, 2.0);
    std::vector<HarnackCertificate> out;
    PdeSolution base = solve(eq, f, band, task.horizon, cfg.grid);
    for (double p : sweep.ps) {
      require_inputs(f, p);
      PdeSolution power = solve(eq, f.power(p), band, task.horizon, cfg.grid);
      auto make = [&](double x, double y) {
        HarnackCertificate c = base_cert(HarnackKind::Harnack, spec, band, f, p, task.horizon, cfg);
        c.x = x;
        c.y = y;
        c.exponent = harnack_exponent(p, k, band, task.horizon, std::abs(x - y), cfg.exponent_form);
        c.exponent_form = cfg.exponent_form;
        c.lhs = std::pow(pde_value(base, band, y), p);
        c.rhs = pde_value(power, band, x);
        c.tolerance_budget = cfg.tolerance;
        return finish(c);
      };
      for (double d : sweep.offsets) {
        out.push_back(make(sweep.x, sweep.x + d));
        if (sweep.include_swapped && d != 0.0) out.push_back(make(sweep.x + d, sweep.x));
      }
    }
    return out;
  });
}

std::vector<HarnackCertificate> shift_harnack_grid(const GsdeSpec& spec,
                                                   const VolatilityBand& band,
                                                   const CertificateSweep& sweep,
                                                   const BackendConfig& cfg) {
  require_kind(spec, GsdeKind::TimeDriven);
  if (cfg.method == Backend::Mc) {
    std::vector<HarnackCertificate> out;
    for (const auto& f : sweep.payoffs)
      for (double t : sweep.horizons)
        for (double p : sweep.ps)
          for (double v : sweep.offsets) {
            out.push_back(verify_shift_harnack(spec, f, sweep.x, v, p, t, band, cfg));
          }
    return out;
  }
  const Equation eq = Equation::of(spec);
  const double k = spec.lipschitz_k();
  return run_tasks(sweep, cfg.exec, [&](const SweepTask& task) {
    const TestFunction& f = *task.payoff;
    require_inputs(f, 2.0);
    std::vector<HarnackCertificate> out;
    const double base = pde_value(solve(eq, f, band, task.horizon, cfg.grid), band, sweep.x);
    for (double p : sweep.ps) {
      require_inputs(f, p);
      const TestFunction fp = f.power(p);
      for (double v : sweep.offsets) {
        HarnackCertificate c =
            base_cert(HarnackKind::ShiftHarnack, spec, band, f, p, task.horizon, cfg);
        c.x = sweep.x;
        c.y = sweep.x;
        c.shift = v;
        c.exponent = shift_harnack_exponent(p, k, band.sigma_lo(), task.horizon, v);
        c.lhs = std::pow(base, p);
        c.rhs = pde_value(solve(eq, fp.shifted(v), band, task.horizon, cfg.grid), band, sweep.x);
        c.tolerance_budget = cfg.tolerance;
        out.push_back(finish(c));
      }
    }
    return out;
  });
}

std::size_t count_failures(std::span<const HarnackCertificate> certs) {
  return static_cast<std::size_t>(
      std::count_if(certs.begin(), certs.end(), [](const auto& c) { return !c.pass; }));
}

StrongFellerProbe strong_feller_probe(const GsdeSpec& spec, const VolatilityBand& band,
                                      double horizon, const Grid1D& grid,
                                      std::size_t refinements) {
  // Indicator of [0, inf): discontinuous before smoothing.
  TestFunction step("step", [](double x) { return x >= 0.0 ? 1.0 : 0.0; }, true,
                    Convexity::Neither, 1.0);
  const Equation eq = Equation::of(spec);
  StrongFellerProbe probe;
  probe.horizon = horizon;
  Grid1D g = grid;
  for (std::size_t r = 0; r < refinements; ++r) {
    PdeSolution sol = solve(eq, step, band, horizon, g);
    Interval safe = padded_interval(g, band, horizon);
    double jump = 0.0;
    for (int j = 0; j + 1 < g.nx(); ++j) {
      if (g.x(j) < safe.lo || g.x(j + 1) > safe.hi) continue;
      jump = std::max(jump, std::abs(sol.values[j + 1] - sol.values[j]));
    }
    probe.rows.push_back({g.nx(), g.dx(), jump});
    g = g.refined();
  }
  probe.pass = true;
  for (std::size_t r = 1; r < probe.rows.size(); ++r) {
    if (!(probe.rows[r].max_jump < probe.rows[r - 1].max_jump)) probe.pass = false;
  }
  return probe;
}

}  // namespace gexp
