#include "gexp/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "gexp/harnack.hpp"
#include "gexp/random.hpp"
#include "gexp/simulate.hpp"
#include "moments.hpp"

namespace gexp {

using detail::Moments;

EtaSchedule::EtaSchedule(const Scenario& scenario, double k, double distance, std::size_t n_steps)
    : scenario_(scenario), k_(k), distance_(distance) {
  if (!(k > 0.0)) {
    throw std::invalid_argument("eta schedule needs K > 0 (use a small positive K for the limit)");
  }
  if (!(distance >= 0.0)) throw std::invalid_argument("distance must be nonnegative");
  if (n_steps == 0) throw std::invalid_argument("n_steps must be positive");
  const double qv_total = scenario.qv_at(scenario.horizon());
  denominator_ = -std::expm1(-2.0 * k * qv_total) / (2.0 * k);

  StepSchedule sched = step_schedule(scenario, n_steps);
  qv_nodes_.resize(n_steps + 1);
  qv_nodes_[0] = 0.0;
  for (std::size_t i = 0; i < n_steps; ++i) qv_nodes_[i + 1] = qv_nodes_[i] + sched.dqv[i];

  step_values_.resize(n_steps);
  const double scale = distance / denominator_;
  for (std::size_t i = 0; i < n_steps; ++i) {
    double dq = sched.dqv[i];
    // \int_{step} e^{-2K qv} dqv in closed form
    double mass = std::exp(-2.0 * k * qv_nodes_[i]) * -std::expm1(-2.0 * k * dq) / (2.0 * k);
    step_values_[i] = scale * std::sqrt(mass / dq);
  }
}

double EtaSchedule::at(double t) const {
  return distance_ * std::exp(-k_ * scenario_.qv_at(t)) / denominator_;
}

double EtaSchedule::defect() const {
  double acc = 0.0;
  for (std::size_t i = 0; i < step_values_.size(); ++i) {
    double dq = qv_nodes_[i + 1] - qv_nodes_[i];
    acc += step_values_[i] * std::exp(-k_ * qv_nodes_[i]) * -std::expm1(-k_ * dq) / k_;
  }
  return std::abs(acc - distance_);
}

EtaSchedule eta_schedule(const Scenario& scenario, double k, double x, double y, double horizon,
                         std::size_t n_steps) {
  if (std::abs(scenario.horizon() - horizon) > 1e-12 * std::max(1.0, horizon)) {
    throw std::invalid_argument("scenario horizon does not match");
  }
  return EtaSchedule(scenario, k, std::abs(x - y), n_steps);
}

double novikov_bound(double k, const VolatilityBand& band, double horizon, double distance) {
  if (!(k > 0.0)) throw std::invalid_argument("Novikov bound needs K > 0");
  const double lo2 = band.var_lo(), hi2 = band.var_hi();
  const double num = 2.0 * k * hi2 * hi2 * -std::expm1(-2.0 * lo2 * k * horizon);
  const double den_root = -std::expm1(-2.0 * hi2 * k * horizon);
  const double den = lo2 * lo2 * lo2 * den_root * den_root;
  return std::exp(num / den * distance * distance);
}

double mt_moment_bound(double p, double k, const VolatilityBand& band, double horizon,
                       double distance) {
  return std::exp(harnack_exponent(p, k, band, horizon, distance));
}

bool CouplingReport::coupling_ok(double relative_tol) const {
  return coupling_gap <= relative_tol * std::abs(x - y);
}

bool CouplingReport::girsanov_ok(double n_se) const {
  return girsanov_identity_gap <= n_se * girsanov_combined_se;
}

bool CouplingReport::unit_mean_ok(double n_se) const {
  return std::abs(mt_mean - 1.0) <= n_se * mt_mean_se;
}

namespace {

struct BlockResult {
  Moments weighted, direct, density, density_power, tau;
  double gap = 0.0;
  double novikov_max = 0.0;
  std::size_t violations = 0;
  std::size_t coupled = 0;
  std::vector<CouplingPath> paths;
};

// Everything about one scenario that does not depend on the path.
struct ScenarioPlan {
  StepSchedule sched;
  std::vector<double> push;  // eta_k
  double eta_defect;
  double novikov_bound;
  double moment_bound;
};

struct PathOutcome {
  double x_terminal, y_terminal, x_tilde, tau, log_density, energy;
};

PathOutcome couple_path(const RealFunction& b, double x, double y, double horizon,
                        const ScenarioPlan& plan, std::span<const double> z, double merge_tol) {
  const auto& dqv = plan.sched.dqv;
  const auto& sqrt_dqv = plan.sched.sqrt_dqv;
  const std::size_t n = dqv.size();
  double xs = x, ys = y, xt = y;
  double log_m = 0.0, energy = 0.0;
  double tau = x == y ? 0.0 : horizon + 1.0;
  std::size_t i = 0;
  if (x != y) {
    for (; i < n; ++i) {
      const double dq = dqv[i];
      const double db = sqrt_dqv[i] * z[i];
      const double bx = b(xs);
      const double x_next = xs + bx * dq + db;
      xt += b(xt) * dq + db;
      const double gap = xs - ys;
      const double by = b(ys);
      const double free_gap = gap + (bx - by) * dq;
      const double push = plan.push[i];
      double u;
      bool meet = false;
      if (std::abs(free_gap) <= push * dq) {
        // the full push would overshoot: close the gap exactly this step
        u = free_gap / dq;
        meet = true;
      } else {
        u = gap > 0.0 ? push : -push;
      }
      double y_next = ys + by * dq + db + u * dq;
      log_m += -u * db - 0.5 * u * u * dq;
      energy += u * u * dq;
      xs = x_next;
      if (meet || std::abs(x_next - y_next) <= merge_tol) {
        tau = plan.sched.h * static_cast<double>(i + 1);
        ++i;
        break;
      }
      ys = y_next;
    }
  }
  // after the coupling time Y is slaved to X and X~^y still runs on its own
  for (; i < n; ++i) {
    const double dq = dqv[i];
    const double db = sqrt_dqv[i] * z[i];
    xs += b(xs) * dq + db;
    xt += b(xt) * dq + db;
  }
  if (tau <= horizon) ys = xs;
  if (!std::isfinite(xs) || !std::isfinite(ys) || !std::isfinite(xt) || !std::isfinite(log_m)) {
    throw std::runtime_error("non-finite coupled state");
  }
  return {xs, ys, xt, tau, log_m, energy};
}

}  // namespace

std::vector<CouplingReport> run_coupling_lattice(const GsdeSpec& spec, double x, double y,
                                                 double horizon,
                                                 std::span<const Scenario> scenarios,
                                                 const McConfig& mc, double p,
                                                 const TestFunction& payoff,
                                                 const Execution& exec,
                                                 const CouplingOptions& options) {
  if (spec.kind() != GsdeKind::QvDriven) {
    throw std::invalid_argument("coupling is defined for the quadratic-variation-driven kind");
  }
  const double k = spec.lipschitz_k();
  if (!(k > 0.0)) throw std::invalid_argument("coupling needs K > 0");
  if (!(p > 1.0)) throw std::invalid_argument("coupling needs p > 1");
  if (scenarios.empty()) throw std::invalid_argument("coupling needs at least one scenario");
  mc.validate();

  const double dist = std::abs(x - y);
  std::vector<ScenarioPlan> plans;
  for (const auto& s : scenarios) {
    const EtaSchedule eta = eta_schedule(s, k, x, y, horizon, mc.n_steps);
    plans.push_back({step_schedule(s, mc.n_steps), eta.step_values(), eta.defect(),
                     novikov_bound(k, s.band(), horizon, dist),
                     mt_moment_bound(p, k, s.band(), horizon, dist)});
  }
  const double q = p / (p - 1.0);
  const double merge_tol = options.merge_tol * (1.0 + dist);
  const auto& b = spec.drift_function();
  const std::size_t n_scen = scenarios.size();

  auto blocks = map_blocks<std::vector<BlockResult>>(
      mc.n_paths, kPathBlock, exec, [&](std::size_t, std::size_t begin, std::size_t end) {
        std::vector<BlockResult> res(n_scen);
        std::vector<double> z(mc.n_steps);
        for (std::size_t path = begin; path < end; ++path) {
          fill_standard_normals(mc.seed, path, z);
          for (std::size_t s = 0; s < n_scen; ++s) {
            const PathOutcome o = couple_path(b, x, y, horizon, plans[s], z, merge_tol);
            BlockResult& r = res[s];
            const double m = std::exp(o.log_density);
            const double novikov = std::exp(o.energy);
            r.weighted.add(m * payoff(o.x_terminal));
            r.direct.add(payoff(o.x_tilde));
            r.density.add(m);
            r.density_power.add(std::exp(q * o.log_density));
            r.gap = std::max(r.gap, std::abs(o.x_terminal - o.y_terminal));
            r.novikov_max = std::max(r.novikov_max, novikov);
            if (novikov > plans[s].novikov_bound * (1.0 + options.novikov_slack)) ++r.violations;
            if (o.tau <= horizon) {
              ++r.coupled;
              r.tau.add(o.tau);
            }
            if (options.keep_paths) {
              r.paths.push_back(
                  {path, o.x_terminal, o.y_terminal, o.tau, o.log_density, novikov});
            }
          }
        }
        return res;
      });

  std::vector<CouplingReport> reports;
  for (std::size_t s = 0; s < n_scen; ++s) {
    Moments weighted, direct, density, density_power, tau;
    CouplingReport rep;
    std::size_t coupled = 0;
    for (auto& blk : blocks) {
      BlockResult& part = blk[s];
      weighted.merge(part.weighted);
      direct.merge(part.direct);
      density.merge(part.density);
      density_power.merge(part.density_power);
      tau.merge(part.tau);
      rep.coupling_gap = std::max(rep.coupling_gap, part.gap);
      rep.novikov_pathwise_max = std::max(rep.novikov_pathwise_max, part.novikov_max);
      rep.novikov_violations += part.violations;
      coupled += part.coupled;
      if (options.keep_paths) {
        rep.paths.insert(rep.paths.end(), part.paths.begin(), part.paths.end());
      }
    }
    rep.scenario_id = scenarios[s].id();
    rep.x = x;
    rep.y = y;
    rep.p = p;
    rep.k = k;
    rep.horizon = horizon;
    rep.n_paths = mc.n_paths;
    rep.n_steps = mc.n_steps;
    rep.seed = mc.seed;
    rep.band = scenarios[s].band();
    rep.coupled_fraction = static_cast<double>(coupled) / static_cast<double>(mc.n_paths);
    rep.mean_tau = tau.mean();
    rep.eta_defect = plans[s].eta_defect;
    rep.novikov_bound = plans[s].novikov_bound;
    rep.weighted_mean = weighted.mean();
    rep.weighted_se = weighted.std_error();
    rep.direct_mean = direct.mean();
    rep.direct_se = direct.std_error();
    rep.girsanov_identity_gap = std::abs(rep.weighted_mean - rep.direct_mean);
    rep.girsanov_combined_se = std::hypot(rep.weighted_se, rep.direct_se);
    rep.mt_mean = density.mean();
    rep.mt_mean_se = density.std_error();
    rep.mt_moment = density_power.mean();
    rep.mt_moment_se = density_power.std_error();
    rep.mt_moment_bound = plans[s].moment_bound;
    reports.push_back(std::move(rep));
  }
  return reports;
}

CouplingReport run_coupling(const GsdeSpec& spec, double x, double y, double horizon,
                            const Scenario& scenario, const McConfig& mc, double p,
                            const TestFunction& payoff, const Execution& exec,
                            const CouplingOptions& options) {
  return run_coupling_lattice(spec, x, y, horizon, std::span(&scenario, 1), mc, p, payoff, exec,
                              options)
      .front();
}

MomentCheck mt_moment_check(const CouplingReport& report) {
  if (!(report.p > 1.0)) throw std::invalid_argument("moment check needs p > 1");
  MomentCheck c;
  c.sample_mean = report.mt_moment;
  c.std_error = report.mt_moment_se;
  c.bound = report.mt_moment_bound;
  double relative_se = c.sample_mean > 0.0 ? c.std_error / c.sample_mean : 0.0;
  c.pass = c.sample_mean <= c.bound * (1.0 + 3.0 * relative_se);
  return c;
}

void write_coupling_paths_csv(const CouplingReport& report, std::ostream& os) {
  os << "path,x_T,y_T,tau,log_density,novikov\n";
  char buf[160];
  for (const auto& p : report.paths) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%.17g,%.17g\n", p.path, p.x_terminal,
                  p.y_terminal, p.tau, p.log_density, p.novikov);
    os << buf;
  }
}

}  // namespace gexp
