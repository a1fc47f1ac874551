// Sup-kernels and quasi-invariant expectations for a family of classical
// Ornstein-Uhlenbeck semigroups P_theta, theta in [1/2, 1], and the density
// bound claimed for the two-member family {1/2, 1}.
#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gexp/core.hpp"
#include "gexp/gheat.hpp"

namespace gexp {

/// Mean of the transition law from x: e^{theta} x as printed, or the OU
/// solution's e^{-theta} x.
enum class MeanMode { AsPrinted, OuConsistent };

std::string to_string(MeanMode mode);
MeanMode mean_mode_from_string(const std::string& s);

struct OuFamily {
  std::vector<double> thetas;
  MeanMode mean_mode = MeanMode::OuConsistent;

  /// n evenly spaced values of [1/2, 1].
  static OuFamily interval(std::size_t n = 11, MeanMode mode = MeanMode::OuConsistent);
  /// The two members {1/2, 1}.
  static OuFamily pair(MeanMode mode = MeanMode::OuConsistent);
};

double ou_mean(double theta, double x, MeanMode mode);
/// 1 - e^{-2 theta}
double ou_variance(double theta);
/// Transition density p_theta(x, z) with respect to Lebesgue measure.
double ou_density(double theta, double x, double z, MeanMode mode);

/// P_theta f(x) by Gauss-Hermite quadrature whose order is doubled until the
/// value changes by less than 1e-10. Throws for theta outside [1/2, 1].
double ou_semigroup(double theta, const TestFunction& payoff, double x, MeanMode mode);

/// max over the family of P_theta f(x).
double sup_semigroup(const OuFamily& family, const TestFunction& payoff, double x);

/// e^{z^2/2} / sqrt(1 - e^{-1}), the sup-kernel with respect to N(0,1).
double sup_kernel_ex34(double x, double z);

/// p_theta(x, z) / phi(z), the density of P_theta(x, .) against N(0,1).
double kernel_ratio(double theta, double x, double z, MeanMode mode);

struct DominanceResult {
  std::size_t checked = 0;
  std::size_t violations = 0;
  double worst_ratio = 0.0;  // max of kernel_ratio / sup_kernel_ex34
  double worst_theta = 0.0;
  double worst_x = 0.0;
  double worst_z = 0.0;
};

/// kernel_ratio <= sup_kernel_ex34 (1 + slack) over the family and the grid.
DominanceResult check_ex34_dominance(const OuFamily& family, std::span<const double> xs,
                                     std::span<const double> zs, double slack = 1e-12);

/// E_0[f] for mu_0 = N(0,1).
double standard_normal_expectation(const RealFunction& f);

/// E_0[max(P_{1/2} f, P_1 f)] - 2 E_0[f]; nonpositive when E_0 is
/// quasi-invariant with g = 2.
double quasi_invariance_gap(const OuFamily& family, const TestFunction& payoff);

/// |E_0[P_theta f] - E_0[f]|.
double member_invariance_gap(double theta, const TestFunction& payoff, MeanMode mode);

/// Classical OU Harnack exponent sup over the family:
///   max_theta alpha e^{-2 theta} |x-y|^2 / (2 (alpha-1)(1 - e^{-2 theta})).
double ou_harnack_psi(const OuFamily& family, double x, double y, double alpha);

inline constexpr double kKernelTruncation = 8.0;

struct LowerBoundRow {
  double x = 0.0;
  double y = 0.0;
  double alpha = 0.0;
  double truncation = kKernelTruncation;
  double lhs = 0.0;  // E_0[p(x,.) p(y,.)] on [-Z, Z]
  double rhs = 0.0;  // e^{-Psi(x,y)}
  double margin() const { return lhs - rhs; }
};

/// Lower bound E_0[p(x,.) p(y,.)] >= e^{-Psi(x,y)} with p = sup_kernel_ex34,
/// the integral truncated to [-Z, Z]. Throws for alpha <= 1.
LowerBoundRow kernel_lower_bound_check(const OuFamily& family, double x, double y, double alpha,
                                       double truncation = kKernelTruncation);

struct SupKernelRow {
  std::string payoff_id;
  double x = 0.0;
  double sup_value = 0.0;     // max_theta P_theta f(x)
  double kernel_value = 0.0;  // E_0[p(x,.) f] on [-Z, Z]
  bool pass = false;
};

/// Definition check for the sup-kernel: sup_value <= kernel_value + tol.
std::vector<SupKernelRow> sup_kernel_definition_check(const OuFamily& family,
                                                      std::span<const TestFunction> payoffs,
                                                      std::span<const double> xs,
                                                      double truncation = kKernelTruncation,
                                                      double tol = 1e-8);

struct DualBoundRow {
  std::string payoff_id;
  double x = 0.0;
  double alpha = 0.0;
  double lhs = 0.0;  // (max_theta P_theta f(x))^alpha with E_0[f^alpha] = 1
  double rhs = 0.0;  // 1 / E_0[e^{-Psi(x,.)}]
  bool pass = false;
};

/// For payoffs normalized to E_0[f^alpha] = 1: (P f(x))^alpha <= 1 / E_0[e^{-Psi(x,.)}].
/// Requires the OuConsistent mode (E_0 must be invariant for every member).
std::vector<DualBoundRow> dual_bound_check(const OuFamily& family,
                                           std::span<const TestFunction> payoffs,
                                           std::span<const double> xs, double alpha = 2.0,
                                           double tol = 1e-10);

struct Ex38Row {
  double x = 0.0;
  double y = 0.0;
  double lhs = 0.0;  // p_{1/2}(x,y) + p_1(x,y)
  double rhs = 0.0;  // printed product-form bound
  bool violated = false;
};

struct Ex38Report {
  MeanMode mean_mode = MeanMode::AsPrinted;
  std::vector<Ex38Row> rows;
  std::size_t violations = 0;
  // bounding box of the violation region (meaningful when violations > 0)
  double violation_x_min = 0.0, violation_x_max = 0.0;
  double violation_y_min = 0.0, violation_y_max = 0.0;
  std::size_t psum_checked = 0;
  std::size_t psum_violations = 0;  // p_sum < max(p_{1/2}, p_1)
  double origin_lhs = 0.0;
  double origin_rhs = 0.0;
};

/// Evaluates both sides of the claimed bound
///   p_{1/2}(x,y) + p_1(x,y) <= exp(A + B) / sqrt(2 pi (1 - e^{-1}))
/// on an nx-by-ny grid of [-2,2] x [-6,6].
Ex38Report ex38_probe(std::size_t nx = 41, std::size_t ny = 121,
                      MeanMode mode = MeanMode::AsPrinted);

/// The printed right-hand side at (x, y).
double ex38_printed_rhs(double x, double y, MeanMode mode = MeanMode::AsPrinted);

struct StationarityResult {
  std::string payoff_id;
  std::vector<double> times;
  std::vector<double> sup_differences;  // |P_{t+1} f - P_t f| on |y| <= window
  double final_spread = 0.0;            // max - min of P_T f over |y| <= spread_window
  bool decreasing = false;
  bool flat = false;
};

/// G-OU fixture dY = -Y dt + dB with the given band: the PDE value becomes
/// stationary in t and independent of the starting point.
StationarityResult gou_stationarity(const TestFunction& payoff, const VolatilityBand& band,
                                    std::span<const double> times, const Grid1D& grid,
                                    double window = 3.0, double spread_window = 2.0,
                                    double spread_tol = 1e-2);

struct KernelReport {
  MeanMode mean_mode = MeanMode::OuConsistent;
  double truncation = kKernelTruncation;
  double gap_tol = 1e-6;
  double invariance_tol = 1e-8;
  DominanceResult dominance;
  std::vector<std::pair<std::string, double>> quasi_invariance_gap;
  std::vector<std::pair<std::string, double>> member_invariance_gap;  // max over {1/2, 1}
  std::vector<LowerBoundRow> lower_bound;
  std::vector<SupKernelRow> sup_kernel;
  std::vector<DualBoundRow> dual_bound;
  Ex38Report ex38;

  std::size_t dominance_violations() const { return dominance.violations; }
  bool pass() const;
};

struct KernelSuiteOptions {
  MeanMode mean_mode = MeanMode::OuConsistent;
  double alpha = 2.0;
  double truncation = kKernelTruncation;
  double gap_tol = 1e-6;
  double invariance_tol = 1e-8;
  std::size_t ex38_nx = 41;
  std::size_t ex38_ny = 121;
};

/// Runs every kernel check on the catalog.
KernelReport run_kernel_suite(const KernelSuiteOptions& options = {});

}  // namespace gexp
