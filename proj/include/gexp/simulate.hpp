// Worst-case Monte Carlo: Euler-Maruyama per volatility scenario with common
// random numbers, and the scenario-max estimator of the sublinear expectation.
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gexp/core.hpp"
#include "gexp/execution.hpp"

namespace gexp {

struct PathEnsemble {
  std::vector<double> terminal;  // X_T per path, indexed by path number
  double x0 = 0.0;
  double horizon = 0.0;
  std::size_t n_steps = 0;
  std::string scenario_id;

  double mean() const;
  double variance() const;  // unbiased
  double std_error() const;
};

/// Per-step increments of one scenario on the uniform grid h = T / n_steps.
struct StepSchedule {
  double h = 0.0;
  std::vector<double> dqv;       // qv(t_{k+1}) - qv(t_k)
  std::vector<double> sqrt_dqv;  // its square root (noise scale)
};

StepSchedule step_schedule(const Scenario& scenario, std::size_t n_steps);

/// Euler-Maruyama paths from x0 under the scenario. Noise for (path, step) is
/// standard_normal(seed, path, step) scaled by sqrt(dqv_k), so the same draws
/// are reused by every scenario.
PathEnsemble simulate_paths(const GsdeSpec& spec, double x0, const Scenario& scenario,
                            const McConfig& mc, const Execution& exec = {});

struct ScenarioStat {
  std::string scenario_id;
  double mean = 0.0;
  double std_error = 0.0;
};

/// max over scenarios of the per-scenario sample means of payoff(X_T). A
/// lower-bound estimator of the sublinear expectation (finite lattice).
struct PbarEstimate {
  double value = 0.0;
  std::size_t argmax = 0;
  std::string argmax_scenario;
  std::vector<ScenarioStat> per_scenario;
  std::size_t n_paths = 0;
  std::size_t n_steps = 0;
  std::uint64_t seed = 0;

  double argmax_std_error() const { return per_scenario.at(argmax).std_error; }
};

PbarEstimate pbar_mc(const GsdeSpec& spec, const TestFunction& payoff, double x0, double horizon,
                     std::span<const Scenario> scenarios, const McConfig& mc,
                     const Execution& exec = {});

/// Sublinear-expectation axioms for the scenario-max estimator. With common
/// random numbers they hold up to round-off, hence the tight default tolerance.
std::vector<AxiomCheck> check_axioms_mc(const GsdeSpec& spec, double x0, double horizon,
                                        std::span<const Scenario> scenarios, const McConfig& mc,
                                        std::span<const TestFunction> payoffs,
                                        const Execution& exec = {}, double tolerance = 1e-12);

}  // namespace gexp
