// Coupling by change of measure for dX = b(X) d<B> + dB, scenario by
// scenario: a second process Y started at y is pushed toward X by the
// control u_t = eta_t sign(X_t - Y_t) until the two meet, and the push is
// removed again by the density M_T = exp(-\int u dB - 1/2 \int u^2 d<B>).
#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "gexp/core.hpp"
#include "gexp/execution.hpp"

namespace gexp {

/// eta_t = |x-y| e^{-K qv(t)} / \int_0^T e^{-2K qv(s)} dqv(s) on the
/// simulation grid. The denominator equals (1 - e^{-2K qv(T)}) / (2K).
class EtaSchedule {
 public:
  EtaSchedule(const Scenario& scenario, double k, double distance, std::size_t n_steps);

  double distance() const { return distance_; }
  double k() const { return k_; }
  double denominator() const { return denominator_; }
  std::size_t n_steps() const { return step_values_.size(); }
  const Scenario& scenario() const { return scenario_; }

  /// Closed-form eta at time t.
  double at(double t) const;
  /// Step value: root-mean-square of eta over step k with respect to d<B>,
  /// so sum_k eta_k^2 dqv_k equals \int eta^2 d<B> exactly.
  double step_value(std::size_t k) const { return step_values_[k]; }
  const std::vector<double>& step_values() const { return step_values_; }
  const std::vector<double>& qv_nodes() const { return qv_nodes_; }

  /// |sum_k eta_k \int_{step k} e^{-K qv} dqv - |x-y||.
  double defect() const;
  /// \int_0^T eta^2 d<B> = |x-y|^2 / denominator.
  double energy() const { return distance_ * distance_ / denominator_; }

 private:
  Scenario scenario_;
  double k_;
  double distance_;
  double denominator_;
  std::vector<double> qv_nodes_;
  std::vector<double> step_values_;
};

EtaSchedule eta_schedule(const Scenario& scenario, double k, double x, double y, double horizon,
                         std::size_t n_steps);

/// Closed-form pathwise bound on exp{\int |u|^2 d<B>} over the whole band.
double novikov_bound(double k, const VolatilityBand& band, double horizon, double distance);
/// Closed-form bound on the sublinear expectation of M_T^{p/(p-1)}.
double mt_moment_bound(double p, double k, const VolatilityBand& band, double horizon,
                       double distance);

struct CouplingPath {
  std::size_t path = 0;
  double x_terminal = 0.0;
  double y_terminal = 0.0;
  double tau = 0.0;  // horizon + 1 if the processes never met
  double log_density = 0.0;
  double novikov = 0.0;
};

struct CouplingReport {
  std::string scenario_id;
  double x = 0.0;
  double y = 0.0;
  double p = 0.0;
  double k = 0.0;
  double horizon = 0.0;
  std::size_t n_paths = 0;
  std::size_t n_steps = 0;
  std::uint64_t seed = 0;
  VolatilityBand band{1.0, 1.0};

  double coupling_gap = 0.0;       // max |X_T - Y_T|
  double coupled_fraction = 0.0;   // share of paths with tau <= T
  double mean_tau = 0.0;           // over coupled paths
  double eta_defect = 0.0;

  double novikov_pathwise_max = 0.0;
  double novikov_bound = 0.0;
  std::size_t novikov_violations = 0;

  double weighted_mean = 0.0;  // E[M_T f(X_T^x)]
  double weighted_se = 0.0;
  double direct_mean = 0.0;    // E[f(X~_T^y)]
  double direct_se = 0.0;
  double girsanov_identity_gap = 0.0;
  double girsanov_combined_se = 0.0;

  double mt_mean = 0.0;
  double mt_mean_se = 0.0;
  double mt_moment = 0.0;  // sample mean of M_T^{p/(p-1)}
  double mt_moment_se = 0.0;
  double mt_moment_bound = 0.0;

  std::vector<CouplingPath> paths;  // filled only on request

  bool coupling_ok(double relative_tol = 1e-2) const;
  bool novikov_ok() const { return novikov_violations == 0; }
  bool girsanov_ok(double n_se = 3.0) const;
  bool unit_mean_ok(double n_se = 3.0) const;
};

struct CouplingOptions {
  bool keep_paths = false;
  /// Relative merge tolerance: |X - Y| <= merge_tol * (1 + |x - y|) counts as met.
  double merge_tol = 1e-10;
  /// Relative slack for the pathwise Novikov inequality.
  double novikov_slack = 1e-9;
};

/// Simulates (X, Y, X~) with shared noise per path under one scenario and
/// fills every report field. Requires a QvDriven spec with K > 0 and p > 1.
CouplingReport run_coupling(const GsdeSpec& spec, double x, double y, double horizon,
                            const Scenario& scenario, const McConfig& mc, double p,
                            const TestFunction& payoff, const Execution& exec = {},
                            const CouplingOptions& options = {});

/// run_coupling for several scenarios at once. Each path's normal draws are
/// generated once and shared by all scenarios, so every report equals the
/// corresponding single-scenario run.
std::vector<CouplingReport> run_coupling_lattice(const GsdeSpec& spec, double x, double y,
                                                 double horizon,
                                                 std::span<const Scenario> scenarios,
                                                 const McConfig& mc, double p,
                                                 const TestFunction& payoff,
                                                 const Execution& exec = {},
                                                 const CouplingOptions& options = {});

struct MomentCheck {
  double sample_mean = 0.0;
  double std_error = 0.0;
  double bound = 0.0;
  bool pass = false;
};

/// sample mean of M_T^{p/(p-1)} <= bound * (1 + 3 relative std errors).
MomentCheck mt_moment_check(const CouplingReport& report);

/// Per-path diagnostics as CSV (requires keep_paths).
void write_coupling_paths_csv(const CouplingReport& report, std::ostream& os);

}  // namespace gexp
