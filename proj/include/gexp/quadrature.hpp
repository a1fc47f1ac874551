// Gauss-Hermite rules and a few fixed integration helpers.
#pragma once

#include <functional>
#include <span>
#include <vector>

namespace gexp {

/// Nodes and weights for \int e^{-x^2} f(x) dx.
struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline constexpr int kMaxHermiteOrder = 512;

/// Cached rule of order n (1 <= n <= kMaxHermiteOrder).
const GaussHermiteRule& gauss_hermite(int n);

/// E[f(mean + sd Z)] for Z ~ N(0,1) with an n-point rule.
double gaussian_expectation(const std::function<double(double)>& f, double mean, double sd,
                            int n);

struct AdaptiveResult {
  double value = 0.0;
  int order = 0;
  double change = 0.0;  // |I_order - I_{order/2}|
  bool converged = false;
};

/// Doubles the order from 32 until two successive results differ by less than
/// `tol` (or the maximum order is reached).
AdaptiveResult gaussian_expectation_adaptive(const std::function<double(double)>& f,
                                             double mean, double sd, double tol = 1e-10);

/// Composite Simpson rule on [a, b] with an even number of intervals.
double integrate_simpson(const std::function<double(double)>& f, double a, double b,
                         int intervals);

}  // namespace gexp
