// Acceptance run: one PASS/FAIL line per criterion, exit code 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "gexp/cli.hpp"
#include "gexp/coupling.hpp"
#include "gexp/gheat.hpp"
#include "gexp/harnack.hpp"
#include "gexp/kernels.hpp"
#include "gexp/simulate.hpp"
#include "oracles.hpp"

using namespace gexp;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Verdict {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Classical reduction: degenerate band, PDE against Gauss-Hermite.
Verdict classical_reduction() {
  const auto start = Clock::now();
  const VolatilityBand band(1.0, 1.0);
  double worst = 0.0;
  std::size_t count = 0;
  for (const auto& f : catalog::all()) {
    for (bool ou : {false, true}) {
      const GsdeSpec spec = ou ? GsdeSpec::ou(GsdeKind::QvDriven) : GsdeSpec::zero(GsdeKind::QvDriven);
      for (double x : {-1.0, 0.0, 1.0}) {
        const auto law = ou ? oracle::ou_law(x, 1.0) : oracle::brownian_law(x, 1.0);
        const double ref = oracle::normal_expectation(f, law.mean, law.sd, 64);
        const double got = pbar_pde(spec, f, x, 1.0, band, Grid1D(-10.0, 10.0, 401));
        worst = std::max(worst, std::abs(got - ref) / std::max(std::abs(ref), 1e-300));
        ++count;
      }
    }
  }
  const double elapsed = seconds_since(start);
  return {worst <= 2e-3 && elapsed < 10.0,
          fmt("%zu values, max rel err %.3g (tol 2e-3), %.2f s (limit 10 s)", count, worst, elapsed)};
}

Verdict g_normal_moments() {
  const VolatilityBand band(0.5, 1.0);
  const auto sq = catalog::clipped_square();
  const double up = solve(Equation::g_heat(), sq, band, 1.0, default_grid()).at(0.0);
  const double down = solve(Equation::g_heat(), sq.negated(), band, 1.0, default_grid()).at(0.0);
  const bool pass = std::abs(up - 1.0) <= 1e-2 && std::abs(down + 0.25) <= 1e-2;
  return {pass, fmt("E[x^2] = %.6f (want 1.00), -E[-x^2] side = %.6f (want -0.25), tol 1e-2", up,
                    down)};
}

Verdict axioms() {
  const VolatilityBand band(0.5, 1.0);
  const auto payoffs = catalog::all();
  const auto lattice = make_scenario_lattice(band, 1.0, 2, 3);
  McConfig mc;
  mc.n_paths = 2000;
  mc.n_steps = 256;
  std::size_t checks = 0, failures = 0;
  double worst_pde = 0.0, worst_mc = 0.0;
  std::vector<GsdeSpec> specs{GsdeSpec::zero(GsdeKind::QvDriven), GsdeSpec::ou(GsdeKind::QvDriven),
                              GsdeSpec::tanh(1.0, GsdeKind::TimeDriven)};
  for (const auto& spec : specs) {
    for (const auto& c : check_axioms_pde(Equation::of(spec), band, 1.0, default_grid(), payoffs,
                                          kPdeRelTolerance)) {
      ++checks;
      failures += c.pass ? 0 : 1;
      worst_pde = std::max(worst_pde, c.worst_violation);
    }
    for (const auto& c : check_axioms_mc(spec, 0.0, 1.0, lattice, mc, payoffs, {}, 1e-12)) {
      ++checks;
      failures += c.pass ? 0 : 1;
      worst_mc = std::max(worst_mc, c.worst_violation);
    }
  }
  for (const auto& c : check_axioms_pde(Equation::g_heat(), band, 1.0, default_grid(), payoffs)) {
    ++checks;
    failures += c.pass ? 0 : 1;
    worst_pde = std::max(worst_pde, c.worst_violation);
  }
  return {failures == 0,
          fmt("%zu checks, %zu failed; worst PDE violation %.3g (tol 2e-3), worst MC %.3g (tol 1e-12)",
              checks, failures, worst_pde, worst_mc)};
}

CertificateSweep full_sweep() {
  CertificateSweep sweep;
  sweep.payoffs = catalog::all();
  sweep.ps = {1.5, 2.0, 4.0};
  sweep.horizons = {0.5, 1.0};
  sweep.x = 0.0;
  sweep.offsets = linspace(0.0, 1.0, 11);
  return sweep;
}

Verdict harnack_grid_criterion() {
  CertificateSweep sweep = full_sweep();
  sweep.include_swapped = true;
  std::size_t total = 0, failures = 0, holder_failures = 0;
  double worst_margin = 0.0, worst_classical_ratio = 0.0;
  std::string worst_where;
  for (const auto& band : {VolatilityBand(1.0, 1.0), VolatilityBand(0.5, 1.0)}) {
    for (bool ou : {true, false}) {
      const GsdeSpec spec =
          ou ? GsdeSpec::ou(GsdeKind::QvDriven) : GsdeSpec::tanh(1.0, GsdeKind::QvDriven);
      BackendConfig cfg;
      const auto certs = harnack_grid(spec, band, sweep, cfg);
      total += certs.size();
      for (const auto& c : certs) {
        if (c.pass) continue;
        ++failures;
        const double rel = c.margin() / c.rhs;
        if (rel < worst_margin) {
          worst_margin = rel;
          worst_where = fmt("%s band(%g,%g) p=%g T=%g y=%g %s", c.drift.c_str(),
                            band.sigma_lo(), band.sigma_hi(), c.p, c.horizon, c.y,
                            c.payoff_id.c_str());
        }
        // For the classical OU case the two sides are Gaussian integrals; an
        // independent evaluation tells whether the failure is numerical.
        if (ou && band.degenerate()) {
          const auto f = catalog::by_id(c.payoff_id);
          const auto ly = oracle::ou_law(c.y, c.horizon), lx = oracle::ou_law(c.x, c.horizon);
          const double lhs = std::pow(oracle::normal_expectation(f, ly.mean, ly.sd), c.p);
          const double rhs = oracle::normal_expectation(
                                 [&](double z) { return std::pow(f(z), c.p); }, lx.mean, lx.sd) *
                             std::exp(c.exponent);
          worst_classical_ratio = std::max(worst_classical_ratio, lhs / rhs);
        }
      }
      cfg.exponent_form = ExponentForm::Holder;
      holder_failures += count_failures(harnack_grid(spec, band, sweep, cfg));
    }
  }
  const double exponent = harnack_exponent(2.0, 1.0, VolatilityBand(1.0, 1.0), 1.0, 1.0);
  const double oracle_exp =
      static_cast<double>(oracle::harnack_exponent(2.0, 1.0, 1.0, 1.0, 1.0, 1.0));
  const double closed = 2.0 / (1.0 - std::exp(-2.0));
  const bool exponent_ok =
      std::abs(exponent - oracle_exp) <= 1e-9 && std::abs(exponent - closed) <= 1e-9;
  std::string detail = fmt("%zu certificates, %zu failing with the printed exponent", total, failures);
  if (failures > 0) {
    detail += fmt(" (worst rel margin %.3g at %s; independent Gaussian check lhs/rhs up to %.4f)",
                  worst_margin, worst_where.c_str(), worst_classical_ratio);
  }
  detail += fmt("; Holder-form exponent: %zu failing; exponent(p=2,K=1,T=1,d=1) = %.12f, "
                "|diff| vs oracle %.2g",
                holder_failures, exponent, std::abs(exponent - oracle_exp));
  return {failures == 0 && exponent_ok, detail};
}

Verdict shift_harnack_grid_criterion() {
  CertificateSweep sweep = full_sweep();
  sweep.include_swapped = false;
  std::size_t total = 0, failures = 0;
  for (const auto& band : {VolatilityBand(1.0, 1.0), VolatilityBand(0.5, 1.0)}) {
    for (bool ou : {true, false}) {
      const GsdeSpec spec =
          ou ? GsdeSpec::ou(GsdeKind::TimeDriven) : GsdeSpec::tanh(1.0, GsdeKind::TimeDriven);
      const auto certs = shift_harnack_grid(spec, band, sweep);
      total += certs.size();
      failures += count_failures(certs);
    }
  }
  const double e = shift_harnack_exponent(2.0, 1.0, 1.0, 1.0, 1.0);
  const bool exponent_ok = std::abs(e - 7.0 / 3.0) <= 1e-12;
  return {failures == 0 && exponent_ok,
          fmt("%zu certificates, %zu failing; exponent(p=2,K=1,sl=1,T=1,v=1) - 7/3 = %.2g", total,
              failures, e - 7.0 / 3.0)};
}

Verdict coupling_suite() {
  const double p = 2.0;
  const auto payoff = catalog::sigmoid();
  const auto ou = GsdeSpec::ou(GsdeKind::QvDriven);
  McConfig mc;
  mc.n_steps = 4096;
  std::size_t scenarios = 0, bad_gap = 0, bad_novikov = 0, bad_moment = 0, bad_girsanov = 0;
  double worst_gap = 0.0, worst_girsanov = 0.0;

  auto account = [&](const std::vector<CouplingReport>& reports, bool girsanov) {
    for (const auto& r : reports) {
      ++scenarios;
      const double d = std::abs(r.x - r.y);
      if (d > 0.0) worst_gap = std::max(worst_gap, r.coupling_gap / d);
      if (!r.coupling_ok(1e-2)) ++bad_gap;
      if (!r.novikov_ok()) ++bad_novikov;
      if (!mt_moment_check(r).pass) ++bad_moment;
      if (girsanov) {
        if (!r.girsanov_ok(3.0)) ++bad_girsanov;
        worst_girsanov = std::max(worst_girsanov, r.girsanov_identity_gap / r.girsanov_combined_se);
      }
    }
  };

  // Timed workload: the 9-scenario lattice (pieces 2, levels 3; it contains
  // every lattice with fewer pieces or levels) for K = 1.
  const auto start = Clock::now();
  const auto lattice = make_scenario_lattice(VolatilityBand(0.5, 1.0), 1.0, 2, 3);
  mc.n_paths = 10000;
  for (double y : {0.5, 1.0}) account(run_coupling_lattice(ou, 0.0, y, 1.0, lattice, mc, p, payoff), false);
  mc.n_paths = 1000;
  account(run_coupling_lattice(ou, 0.4, 0.4, 1.0, lattice, mc, p, payoff), false);
  mc.n_paths = 100000;
  account(run_coupling_lattice(ou, 0.0, 1.0, 1.0, lattice, mc, p, payoff), true);
  const double elapsed = seconds_since(start);

  // Extra coverage outside the timed workload: a nonlinear drift and the
  // degenerate band.
  const auto extra_start = Clock::now();
  mc.n_paths = 10000;
  account(run_coupling_lattice(GsdeSpec::tanh(1.0, GsdeKind::QvDriven), 0.0, 1.0, 1.0, lattice,
                               mc, p, payoff),
          true);
  const auto unit = make_scenario_lattice(VolatilityBand(1.0, 1.0), 1.0, 2, 3);
  account(run_coupling_lattice(ou, 0.0, 1.0, 1.0, unit, mc, p, payoff), true);
  const double extra = seconds_since(extra_start);

  const bool pass = bad_gap == 0 && bad_novikov == 0 && bad_moment == 0 && bad_girsanov == 0 &&
                    elapsed < 120.0;
  return {pass, fmt("%zu scenario runs; gap failures %zu (worst gap/d %.2g), Novikov %zu, moment %zu, "
                    "Girsanov %zu (worst %.2f se); lattice workload %.1f s (limit 120 s), extra "
                    "tanh:1 and band (1,1) runs %.1f s",
                    scenarios, bad_gap, worst_gap, bad_novikov, bad_moment, bad_girsanov,
                    worst_girsanov, elapsed, extra)};
}

Verdict kernel_suite() {
  const auto rep = run_kernel_suite();
  double worst_gap = -1e300, worst_inv = 0.0, worst_margin = 1e300;
  for (const auto& [id, g] : rep.quasi_invariance_gap) worst_gap = std::max(worst_gap, g);
  for (const auto& [id, g] : rep.member_invariance_gap) worst_inv = std::max(worst_inv, g);
  for (const auto& row : rep.lower_bound) worst_margin = std::min(worst_margin, row.margin());
  std::size_t lb_points = 0;
  for (const auto& row : rep.lower_bound) {
    if (row.alpha == 2.0 && row.truncation == 8.0) ++lb_points;
  }
  const bool pass = rep.dominance.violations == 0 && worst_gap <= 1e-6 && worst_inv <= 1e-8 &&
                    worst_margin >= 0.0 && lb_points >= 9 && rep.mean_mode == MeanMode::OuConsistent;
  return {pass, fmt("dominance %zu/%zu violations (worst ratio %.12f); max quasi-invariance gap %.3g; "
                    "max member invariance %.3g; min lower-bound margin %.3g over %zu points",
                    rep.dominance.violations, rep.dominance.checked, rep.dominance.worst_ratio,
                    worst_gap, worst_inv, worst_margin, lb_points)};
}

Verdict density_probe() {
  const auto a = ex38_probe();
  const auto b = ex38_probe();
  bool same = a.rows.size() == b.rows.size() && a.violations == b.violations;
  for (std::size_t i = 0; same && i < a.rows.size(); ++i) {
    same = a.rows[i].lhs == b.rows[i].lhs && a.rows[i].rhs == b.rows[i].rhs &&
           a.rows[i].violated == b.rows[i].violated;
  }
  const long double lhs =
      oracle::ou_density(0.5L, 0.0L, 0.0L) + oracle::ou_density(1.0L, 0.0L, 0.0L);
  const long double rhs =
      1.0L / std::sqrt(2.0L * std::numbers::pi_v<long double> * (1.0L - std::exp(-1.0L)));
  const double err = std::max(std::abs(a.origin_lhs - static_cast<double>(lhs)),
                              std::abs(a.origin_rhs - static_cast<double>(rhs)));
  const bool pass = same && !a.rows.empty() && a.psum_checked > 0 && a.psum_violations == 0 &&
                    err <= 1e-12;
  return {pass, fmt("deterministic=%s, %zu rows, printed bound fails at %zu (box x[%g,%g] y[%g,%g]); "
                    "p_sum violations %zu/%zu; origin lhs-rhs %.12f, |err| vs closed form %.2g",
                    same ? "yes" : "no", a.rows.size(), a.violations, a.violation_x_min,
                    a.violation_x_max, a.violation_y_min, a.violation_y_max, a.psum_violations,
                    a.psum_checked, a.origin_lhs - a.origin_rhs, err)};
}

Verdict reproducibility() {
  std::vector<std::vector<std::string>> commands{
      {"gheat", "--payoff", "clipped-x2", "--band", "0.5,1"},
      {"pbar", "--payoff", "clipped-x2", "--band", "0.5,1", "--drift", "ou"},
      {"harnack", "--band", "0.5,1", "--sweep", "11", "--payoff", "all"},
      {"shift-harnack", "--drift", "tanh:1", "--sweep", "11", "--payoff", "all"},
      {"coupling", "--band", "0.5,1", "--paths", "2000", "--steps", "1024"},
      {"kernels"},
      {"axioms", "--band", "0.5,1"}};
  std::size_t identical = 0;
  std::string differing;
  for (auto args : commands) {
    args.push_back("--sequential");
    for (const char* format : {"json", "csv"}) {
      auto full = args;
      full.push_back("--format");
      full.push_back(format);
      std::ostringstream o1, o2, e1, e2;
      const int c1 = run_cli(full, o1, e1);
      const int c2 = run_cli(full, o2, e2);
      if (c1 == c2 && c1 != kExitUsage && !o1.str().empty() && o1.str() == o2.str()) {
        ++identical;
      } else {
        differing += " " + args.front() + "/" + format;
      }
    }
  }
  const std::size_t total = commands.size() * 2;
  return {identical == total,
          fmt("%zu/%zu subcommand reports byte-identical across two runs%s%s", identical, total,
              differing.empty() ? "" : "; differing:", differing.c_str())};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"classical reduction", classical_reduction},
      {"G-normal moments", g_normal_moments},
      {"sublinear axioms", axioms},
      {"Harnack certificate grid", harnack_grid_criterion},
      {"shift-Harnack certificate grid", shift_harnack_grid_criterion},
      {"coupling suite", coupling_suite},
      {"kernel suite", kernel_suite},
      {"density probe", density_probe},
      {"reproducibility", reproducibility}};
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    if (!v.pass) ++failed;
    std::printf("criterion %zu %s: %s | %s\n", i + 1, v.pass ? "PASS" : "FAIL",
                criteria[i].first.c_str(), v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
