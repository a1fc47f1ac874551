#include "gexp/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "gexp/harnack.hpp"
#include "gexp/quadrature.hpp"

namespace gexp {

namespace {

constexpr double kOuQuadTol = 1e-10;
constexpr int kSimpsonIntervals = 16000;

void require_theta(double theta) {
  if (!(theta >= 0.5 && theta <= 1.0)) {
    throw std::invalid_argument("theta=" + format_real(theta) + " outside [1/2, 1]");
  }
}

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

}  // namespace

std::string to_string(MeanMode mode) {
  return mode == MeanMode::AsPrinted ? "as-printed" : "ou-consistent";
}

MeanMode mean_mode_from_string(const std::string& s) {
  if (s == "as-printed") return MeanMode::AsPrinted;
  if (s == "ou-consistent") return MeanMode::OuConsistent;
  throw std::invalid_argument("unknown mean mode '" + s + "' (as-printed | ou-consistent)");
}

OuFamily OuFamily::interval(std::size_t n, MeanMode mode) {
  if (n < 2) throw std::invalid_argument("interval family needs at least 2 points");
  return {linspace(0.5, 1.0, n), mode};
}

OuFamily OuFamily::pair(MeanMode mode) { return {{0.5, 1.0}, mode}; }

double ou_mean(double theta, double x, MeanMode mode) {
  return (mode == MeanMode::AsPrinted ? std::exp(theta) : std::exp(-theta)) * x;
}

double ou_variance(double theta) { return -std::expm1(-2.0 * theta); }

double ou_density(double theta, double x, double z, MeanMode mode) {
  const double var = ou_variance(theta);
  const double d = z - ou_mean(theta, x, mode);
  return std::exp(-d * d / (2.0 * var)) / std::sqrt(2.0 * std::numbers::pi * var);
}

double ou_semigroup(double theta, const TestFunction& payoff, double x, MeanMode mode) {
  require_theta(theta);
  return gaussian_expectation_adaptive(payoff, ou_mean(theta, x, mode),
                                       std::sqrt(ou_variance(theta)), kOuQuadTol)
      .value;
}

double sup_semigroup(const OuFamily& family, const TestFunction& payoff, double x) {
  if (family.thetas.empty()) throw std::invalid_argument("empty OU family");
  double best = -std::numeric_limits<double>::infinity();
  for (double theta : family.thetas) {
    best = std::max(best, ou_semigroup(theta, payoff, x, family.mean_mode));
  }
  return best;
}

double sup_kernel_ex34(double /*x*/, double z) {
  return std::exp(0.5 * z * z) / std::sqrt(-std::expm1(-1.0));
}

double kernel_ratio(double theta, double x, double z, MeanMode mode) {
  // p_theta(x,z) / phi(z) = exp(z^2/2 - (z - m)^2 / (2 var)) / sqrt(var)
  const double var = ou_variance(theta);
  const double d = z - ou_mean(theta, x, mode);
  return std::exp(0.5 * z * z - d * d / (2.0 * var)) / std::sqrt(var);
}

DominanceResult check_ex34_dominance(const OuFamily& family, std::span<const double> xs,
                                     std::span<const double> zs, double slack) {
  DominanceResult r;
  for (double theta : family.thetas) {
    require_theta(theta);
    for (double x : xs) {
      for (double z : zs) {
        const double ratio = kernel_ratio(theta, x, z, family.mean_mode);
        const double bound = sup_kernel_ex34(x, z);
        ++r.checked;
        if (ratio > bound * (1.0 + slack)) ++r.violations;
        if (ratio / bound > r.worst_ratio) {
          r.worst_ratio = ratio / bound;
          r.worst_theta = theta;
          r.worst_x = x;
          r.worst_z = z;
        }
      }
    }
  }
  return r;
}

double standard_normal_expectation(const RealFunction& f) {
  return gaussian_expectation_adaptive(f, 0.0, 1.0, kOuQuadTol).value;
}

double quasi_invariance_gap(const OuFamily& family, const TestFunction& payoff) {
  if (!payoff.positive()) throw std::invalid_argument("payoff must be nonnegative");
  const double sup_part =
      standard_normal_expectation([&](double x) { return sup_semigroup(family, payoff, x); });
  return sup_part - 2.0 * standard_normal_expectation(payoff);
}

double member_invariance_gap(double theta, const TestFunction& payoff, MeanMode mode) {
  require_theta(theta);
  const double nested = standard_normal_expectation(
      [&](double x) { return ou_semigroup(theta, payoff, x, mode); });
  return std::abs(nested - standard_normal_expectation(payoff));
}

double ou_harnack_psi(const OuFamily& family, double x, double y, double alpha) {
  if (!(alpha > 1.0)) throw std::invalid_argument("alpha must exceed 1");
  const double d2 = (x - y) * (x - y);
  double psi = 0.0;
  for (double theta : family.thetas) {
    psi = std::max(psi, alpha * std::exp(-2.0 * theta) * d2 /
                            (2.0 * (alpha - 1.0) * ou_variance(theta)));
  }
  return psi;
}

LowerBoundRow kernel_lower_bound_check(const OuFamily& family, double x, double y, double alpha,
                                       double truncation) {
  if (!(alpha > 1.0)) throw std::invalid_argument("alpha must exceed 1");
  LowerBoundRow row;
  row.x = x;
  row.y = y;
  row.alpha = alpha;
  row.truncation = truncation;
  row.lhs = integrate_simpson(
      [&](double z) { return sup_kernel_ex34(x, z) * sup_kernel_ex34(y, z) * normal_pdf(z); },
      -truncation, truncation, kSimpsonIntervals);
  row.rhs = std::exp(-ou_harnack_psi(family, x, y, alpha));
  return row;
}

std::vector<SupKernelRow> sup_kernel_definition_check(const OuFamily& family,
                                                      std::span<const TestFunction> payoffs,
                                                      std::span<const double> xs,
                                                      double truncation, double tol) {
  std::vector<SupKernelRow> rows;
  for (const auto& f : payoffs) {
    if (!f.positive()) throw std::invalid_argument("payoff must be nonnegative");
    for (double x : xs) {
      SupKernelRow r;
      r.payoff_id = f.id();
      r.x = x;
      r.sup_value = sup_semigroup(family, f, x);
      r.kernel_value = integrate_simpson(
          [&](double z) { return sup_kernel_ex34(x, z) * f(z) * normal_pdf(z); }, -truncation,
          truncation, kSimpsonIntervals);
      r.pass = r.sup_value <= r.kernel_value + tol;
      rows.push_back(r);
    }
  }
  return rows;
}

std::vector<DualBoundRow> dual_bound_check(const OuFamily& family,
                                           std::span<const TestFunction> payoffs,
                                           std::span<const double> xs, double alpha, double tol) {
  if (family.mean_mode != MeanMode::OuConsistent) {
    throw std::invalid_argument("dual bound needs an invariant E_0 (ou-consistent mode)");
  }
  if (!(alpha > 1.0)) throw std::invalid_argument("alpha must exceed 1");
  std::vector<DualBoundRow> rows;
  for (const auto& f : payoffs) {
    if (!f.positive()) throw std::invalid_argument("payoff must be nonnegative");
    const double norm = standard_normal_expectation([&](double z) { return std::pow(f(z), alpha); });
    for (double x : xs) {
      DualBoundRow r;
      r.payoff_id = f.id();
      r.x = x;
      r.alpha = alpha;
      r.lhs = std::pow(sup_semigroup(family, f, x), alpha) / norm;
      r.rhs = 1.0 / standard_normal_expectation(
                        [&](double y) { return std::exp(-ou_harnack_psi(family, x, y, alpha)); });
      r.pass = r.lhs <= r.rhs * (1.0 + tol);
      rows.push_back(r);
    }
  }
  return rows;
}

double ex38_printed_rhs(double x, double y, MeanMode mode) {
  const double v_half = ou_variance(0.5), v_one = ou_variance(1.0);
  const double a = y - ou_mean(0.5, x, mode);
  const double b = y - ou_mean(1.0, x, mode);
  return std::exp(-a * a / (2.0 * v_half) - b * b / (2.0 * v_one)) /
         std::sqrt(2.0 * std::numbers::pi * v_half);
}

Ex38Report ex38_probe(std::size_t nx, std::size_t ny, MeanMode mode) {
  Ex38Report rep;
  rep.mean_mode = mode;
  bool first = true;
  for (double x : linspace(-2.0, 2.0, nx)) {
    for (double y : linspace(-6.0, 6.0, ny)) {
      const double p_half = ou_density(0.5, x, y, mode);
      const double p_one = ou_density(1.0, x, y, mode);
      Ex38Row row{x, y, p_half + p_one, ex38_printed_rhs(x, y, mode), false};
      row.violated = row.lhs > row.rhs;
      if (row.violated) {
        ++rep.violations;
        if (first) {
          rep.violation_x_min = rep.violation_x_max = x;
          rep.violation_y_min = rep.violation_y_max = y;
          first = false;
        }
        rep.violation_x_min = std::min(rep.violation_x_min, x);
        rep.violation_x_max = std::max(rep.violation_x_max, x);
        rep.violation_y_min = std::min(rep.violation_y_min, y);
        rep.violation_y_max = std::max(rep.violation_y_max, y);
      }
      ++rep.psum_checked;
      if (row.lhs < std::max(p_half, p_one)) ++rep.psum_violations;
      rep.rows.push_back(row);
    }
  }
  rep.origin_lhs = ou_density(0.5, 0.0, 0.0, mode) + ou_density(1.0, 0.0, 0.0, mode);
  rep.origin_rhs = ex38_printed_rhs(0.0, 0.0, mode);
  return rep;
}

StationarityResult gou_stationarity(const TestFunction& payoff, const VolatilityBand& band,
                                    std::span<const double> times, const Grid1D& grid,
                                    double window, double spread_window, double spread_tol) {
  if (times.size() < 2) throw std::invalid_argument("need at least two times");
  const Equation eq = Equation::time_driven([](double x) { return -x; }, "ou");
  auto series = solve_series(eq, payoff, band, times, grid);
  StationarityResult r;
  r.payoff_id = payoff.id();
  r.times.assign(times.begin(), times.end());
  for (std::size_t i = 0; i + 1 < series.size(); ++i) {
    double diff = 0.0;
    for (int j = 0; j < grid.nx(); ++j) {
      if (std::abs(grid.x(j)) > window) continue;
      diff = std::max(diff, std::abs(series[i + 1].values[j] - series[i].values[j]));
    }
    r.sup_differences.push_back(diff);
  }
  r.decreasing = true;
  for (std::size_t i = 1; i < r.sup_differences.size(); ++i) {
    if (r.sup_differences[i] > r.sup_differences[i - 1] + 1e-12) r.decreasing = false;
  }
  const auto& last = series.back().values;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (int j = 0; j < grid.nx(); ++j) {
    if (std::abs(grid.x(j)) > spread_window) continue;
    lo = std::min(lo, last[j]);
    hi = std::max(hi, last[j]);
  }
  r.final_spread = hi - lo;
  r.flat = r.final_spread <= spread_tol * std::max({1.0, std::abs(lo), std::abs(hi)});
  return r;
}

bool KernelReport::pass() const {
  if (dominance.violations != 0 || ex38.psum_violations != 0) return false;
  for (const auto& [id, gap] : quasi_invariance_gap) {
    if (gap > gap_tol) return false;
  }
  for (const auto& [id, gap] : member_invariance_gap) {
    if (gap > invariance_tol) return false;
  }
  for (const auto& row : lower_bound) {
    if (row.margin() < 0.0) return false;
  }
  for (const auto& row : sup_kernel) {
    if (!row.pass) return false;
  }
  for (const auto& row : dual_bound) {
    if (!row.pass) return false;
  }
  return true;
}

KernelReport run_kernel_suite(const KernelSuiteOptions& options) {
  KernelReport rep;
  rep.mean_mode = options.mean_mode;
  rep.truncation = options.truncation;
  rep.gap_tol = options.gap_tol;
  rep.invariance_tol = options.invariance_tol;

  const auto payoffs = catalog::all();
  const OuFamily interval = OuFamily::interval(11, options.mean_mode);
  const OuFamily pair = OuFamily::pair(options.mean_mode);

  const auto xs = linspace(-2.0, 2.0, 41);
  const auto zs = linspace(-4.0, 4.0, 81);
  rep.dominance = check_ex34_dominance(interval, xs, zs);

  for (const auto& f : payoffs) {
    rep.quasi_invariance_gap.emplace_back(f.id(), quasi_invariance_gap(pair, f));
    double gap = 0.0;
    for (double theta : pair.thetas) {
      gap = std::max(gap, member_invariance_gap(theta, f, options.mean_mode));
    }
    rep.member_invariance_gap.emplace_back(f.id(), gap);
  }
  for (double x : {-1.0, 0.0, 1.0}) {
    for (double y : {-1.0, 0.0, 1.0}) {
      rep.lower_bound.push_back(
          kernel_lower_bound_check(pair, x, y, options.alpha, options.truncation));
    }
  }
  const auto coarse = linspace(-2.0, 2.0, 9);
  rep.sup_kernel = sup_kernel_definition_check(interval, payoffs, coarse, options.truncation);
  if (options.mean_mode == MeanMode::OuConsistent) {
    rep.dual_bound = dual_bound_check(pair, payoffs, coarse, options.alpha);
  }
  rep.ex38 = ex38_probe(options.ex38_nx, options.ex38_ny, MeanMode::AsPrinted);
  return rep;
}

}  // namespace gexp
