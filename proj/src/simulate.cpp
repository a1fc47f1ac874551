#include "gexp/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gexp/random.hpp"
#include "moments.hpp"

namespace gexp {

using detail::Moments;

namespace {

double integrate_path(const GsdeSpec& spec, double x0, const StepSchedule& sched,
                      std::span<const double> normals) {
  double x = x0;
  const bool qv_driven = spec.kind() == GsdeKind::QvDriven;
  const std::size_t n = sched.dqv.size();
  for (std::size_t k = 0; k < n; ++k) {
    double clock = qv_driven ? sched.dqv[k] : sched.h;
    x += spec.drift(x) * clock + sched.sqrt_dqv[k] * normals[k];
    if (!std::isfinite(x)) {
      throw std::runtime_error("non-finite SDE state at step " + std::to_string(k + 1));
    }
  }
  return x;
}

void require_horizon(const Scenario& scenario, double horizon) {
  if (std::abs(scenario.horizon() - horizon) > 1e-12 * std::max(1.0, horizon)) {
    throw std::invalid_argument("scenario " + scenario.id() + " has horizon " +
                                format_real(scenario.horizon()) + ", expected " +
                                format_real(horizon));
  }
}

}  // namespace

double PathEnsemble::mean() const {
  Moments m;
  for (double x : terminal) m.add(x);
  return m.mean();
}

double PathEnsemble::variance() const {
  Moments m;
  for (double x : terminal) m.add(x);
  return m.n > 1.0 ? m.m2 / (m.n - 1.0) : 0.0;
}

double PathEnsemble::std_error() const {
  Moments m;
  for (double x : terminal) m.add(x);
  return m.std_error();
}

StepSchedule step_schedule(const Scenario& scenario, std::size_t n_steps) {
  if (n_steps == 0) throw std::invalid_argument("n_steps must be positive");
  StepSchedule s;
  const double T = scenario.horizon();
  s.h = T / static_cast<double>(n_steps);
  s.dqv.resize(n_steps);
  s.sqrt_dqv.resize(n_steps);
  double previous = 0.0;
  for (std::size_t k = 0; k < n_steps; ++k) {
    double t_next = (k + 1 == n_steps) ? T : s.h * static_cast<double>(k + 1);
    double q = scenario.qv_at(t_next);
    s.dqv[k] = q - previous;
    s.sqrt_dqv[k] = std::sqrt(s.dqv[k]);
    previous = q;
  }
  return s;
}

PathEnsemble simulate_paths(const GsdeSpec& spec, double x0, const Scenario& scenario,
                            const McConfig& mc, const Execution& exec) {
  mc.validate();
  StepSchedule sched = step_schedule(scenario, mc.n_steps);
  PathEnsemble out;
  out.x0 = x0;
  out.horizon = scenario.horizon();
  out.n_steps = mc.n_steps;
  out.scenario_id = scenario.id();
  out.terminal.resize(mc.n_paths);
  map_blocks<char>(mc.n_paths, kPathBlock, exec, [&](std::size_t, std::size_t begin, std::size_t end) {
    std::vector<double> z(mc.n_steps);
    for (std::size_t p = begin; p < end; ++p) {
      fill_standard_normals(mc.seed, p, z);
      out.terminal[p] = integrate_path(spec, x0, sched, z);
    }
    return char{0};
  });
  return out;
}

namespace {

// Per-scenario payoff moments for each path block; every path's normal draws
// are generated once and shared by all scenarios.
std::vector<Moments> scenario_moments(const GsdeSpec& spec, const TestFunction& payoff, double x0,
                                      std::span<const Scenario> scenarios, const McConfig& mc,
                                      const Execution& exec) {
  std::vector<StepSchedule> schedules;
  schedules.reserve(scenarios.size());
  for (const auto& s : scenarios) schedules.push_back(step_schedule(s, mc.n_steps));

  auto blocks = map_blocks<std::vector<Moments>>(
      mc.n_paths, kPathBlock, exec, [&](std::size_t, std::size_t begin, std::size_t end) {
        std::vector<Moments> acc(scenarios.size());
        std::vector<double> z(mc.n_steps);
        for (std::size_t p = begin; p < end; ++p) {
          fill_standard_normals(mc.seed, p, z);
          for (std::size_t s = 0; s < scenarios.size(); ++s) {
            acc[s].add(payoff(integrate_path(spec, x0, schedules[s], z)));
          }
        }
        return acc;
      });
  std::vector<Moments> total(scenarios.size());
  for (const auto& b : blocks) {
    for (std::size_t s = 0; s < total.size(); ++s) total[s].merge(b[s]);
  }
  return total;
}

}  // namespace

PbarEstimate pbar_mc(const GsdeSpec& spec, const TestFunction& payoff, double x0, double horizon,
                     std::span<const Scenario> scenarios, const McConfig& mc,
                     const Execution& exec) {
  if (scenarios.empty()) throw std::invalid_argument("pbar_mc needs at least one scenario");
  mc.validate();
  for (const auto& s : scenarios) require_horizon(s, horizon);

  auto moments = scenario_moments(spec, payoff, x0, scenarios, mc, exec);
  PbarEstimate est;
  est.n_paths = mc.n_paths;
  est.n_steps = mc.n_steps;
  est.seed = mc.seed;
  for (std::size_t s = 0; s < scenarios.size(); ++s) {
    est.per_scenario.push_back({scenarios[s].id(), moments[s].mean(), moments[s].std_error()});
    if (s == 0 || moments[s].mean() > est.value) {
      est.value = moments[s].mean();
      est.argmax = s;
    }
  }
  est.argmax_scenario = scenarios[est.argmax].id();
  return est;
}

std::vector<AxiomCheck> check_axioms_mc(const GsdeSpec& spec, double x0, double horizon,
                                        std::span<const Scenario> scenarios, const McConfig& mc,
                                        std::span<const TestFunction> payoffs,
                                        const Execution& exec, double tolerance) {
  auto value = [&](const TestFunction& f) {
    return pbar_mc(spec, f, x0, horizon, scenarios, mc, exec).value;
  };
  const std::string tag = spec.name() + "/" + to_string(spec.kind()) + " x0=" + format_real(x0) +
                          " scenarios=" + std::to_string(scenarios.size());
  std::vector<double> base;
  for (const auto& f : payoffs) base.push_back(value(f));

  std::vector<AxiomCheck> out;
  for (std::size_t i = 0; i < payoffs.size(); ++i) {
    const auto& f = payoffs[i];
    auto sig = catalog::sigmoid();
    TestFunction lower_min(f.id() + "^sigmoid",
                           [f, sig](double x) { return std::min(f(x), sig(x)); }, f.positive(),
                           Convexity::Neither, f.bound());
    for (const auto& g : {f.scaled(0.5), f.plus_constant(-0.1), lower_min}) {
      // f >= g holds pointwise for all three constructions when f >= 0
      if (!f.positive()) continue;
      double vg = value(g);
      double excess = vg - base[i];
      AxiomCheck c{"monotonicity", "mc", tag + " f=" + f.id() + " g=" + g.id(), std::max(0.0, excess),
                   0.0, excess <= 0.0};
      out.push_back(c);
    }
  }
  for (double cst : {1.0, 2.5, -0.5}) {
    double v = value(catalog::constant(cst));
    AxiomCheck c{"constant", "mc", tag + " c=" + format_real(cst), std::abs(v - cst), tolerance,
                 true};
    c.pass = c.worst_violation <= tolerance * std::max(1.0, std::abs(cst));
    out.push_back(c);
  }
  for (std::size_t i = 0; i < payoffs.size(); ++i) {
    for (std::size_t k = i; k < payoffs.size(); ++k) {
      double v = value(TestFunction::sum(payoffs[i], payoffs[k]));
      double scale = std::max({1.0, std::abs(base[i]), std::abs(base[k])});
      double excess = (v - base[i] - base[k]) / scale;
      AxiomCheck c{"subadditivity", "mc", tag + " f=" + payoffs[i].id() + " g=" + payoffs[k].id(),
                   std::max(0.0, excess), tolerance, excess <= tolerance};
      out.push_back(c);
    }
  }
  for (std::size_t i = 0; i < payoffs.size(); ++i) {
    for (double lambda : {0.0, 0.5, 3.0}) {
      double v = value(payoffs[i].scaled(lambda));
      double scale = std::max(1.0, std::abs(lambda * base[i]));
      double gap = std::abs(v - lambda * base[i]) / scale;
      AxiomCheck c{"homogeneity", "mc",
                   tag + " f=" + payoffs[i].id() + " lambda=" + format_real(lambda), gap, tolerance,
                   gap <= tolerance};
      out.push_back(c);
    }
  }
  return out;
}

}  // namespace gexp
