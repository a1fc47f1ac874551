#include "gexp/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace gexp {

namespace {

struct HermiteValue {
  double p;   // orthonormal Hermite polynomial of degree n at z
  double dp;  // its derivative
};

HermiteValue hermite(int n, double z) {
  const double pim4 = 1.0 / std::pow(std::numbers::pi, 0.25);
  double p1 = pim4, p2 = 0.0;
  for (int j = 0; j < n; ++j) {
    double p3 = p2;
    p2 = p1;
    p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
  }
  return {p1, std::sqrt(2.0 * n) * p2};
}

// Positive roots are bracketed by a sign scan of the orthonormal recurrence
// and polished by Newton steps kept inside the bracket.
GaussHermiteRule build_rule(int n) {
  GaussHermiteRule rule;
  rule.nodes.assign(n, 0.0);
  rule.weights.assign(n, 0.0);
  const int positive = n / 2;
  const double z_max = std::sqrt(2.0 * n + 1.0) + 1.0;
  const int scan = 40 * n + 40;
  std::vector<double> roots;
  double lo = z_max / scan;
  double f_lo = hermite(n, lo).p;
  for (int k = 2; k <= scan && static_cast<int>(roots.size()) < positive; ++k) {
    double hi = z_max * k / scan;
    double f_hi = hermite(n, hi).p;
    if ((f_lo < 0.0) != (f_hi < 0.0)) {
      double a = lo, b = hi, fa = f_lo;
      double z = 0.5 * (a + b);
      for (int it = 0; it < 200; ++it) {
        HermiteValue v = hermite(n, z);
        if (v.p == 0.0) break;
        if ((v.p < 0.0) == (fa < 0.0)) {
          a = z;
          fa = v.p;
        } else {
          b = z;
        }
        double next = z - v.p / v.dp;
        if (!(next > a && next < b)) next = 0.5 * (a + b);
        double step = std::abs(next - z);
        z = next;
        if (step <= 1e-15 * z || b - a <= 1e-15 * z) break;
      }
      roots.push_back(z);
    }
    lo = hi;
    f_lo = f_hi;
  }
  if (static_cast<int>(roots.size()) != positive) {
    throw std::runtime_error("Gauss-Hermite root scan found " + std::to_string(roots.size()) +
                             " positive roots for order " + std::to_string(n));
  }
  // roots are ascending; store nodes descending to match the usual layout
  for (int i = 0; i < positive; ++i) {
    double z = roots[positive - 1 - i];
    double pp = hermite(n, z).dp;
    rule.nodes[i] = z;
    rule.nodes[n - 1 - i] = -z;
    rule.weights[i] = 2.0 / (pp * pp);
    rule.weights[n - 1 - i] = rule.weights[i];
  }
  if (n % 2 == 1) {
    double pp = hermite(n, 0.0).dp;
    rule.nodes[positive] = 0.0;
    rule.weights[positive] = 2.0 / (pp * pp);
  }
  return rule;
}

}  // namespace

const GaussHermiteRule& gauss_hermite(int n) {
  if (n < 1 || n > kMaxHermiteOrder) {
    throw std::invalid_argument("Gauss-Hermite order must be in [1, " +
                                std::to_string(kMaxHermiteOrder) + "]");
  }
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<GaussHermiteRule>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<GaussHermiteRule>(build_rule(n));
  return *slot;
}

double gaussian_expectation(const std::function<double(double)>& f, double mean, double sd,
                            int n) {
  const auto& rule = gauss_hermite(n);
  const double scale = std::numbers::sqrt2 * sd;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    if (rule.weights[i] == 0.0) continue;
    acc += rule.weights[i] * f(mean + scale * rule.nodes[i]);
  }
  return acc / std::sqrt(std::numbers::pi);
}

AdaptiveResult gaussian_expectation_adaptive(const std::function<double(double)>& f,
                                             double mean, double sd, double tol) {
  AdaptiveResult out;
  double previous = gaussian_expectation(f, mean, sd, 32);
  for (int n = 64; n <= kMaxHermiteOrder; n *= 2) {
    double current = gaussian_expectation(f, mean, sd, n);
    out.value = current;
    out.order = n;
    out.change = std::abs(current - previous);
    if (out.change < tol) {
      out.converged = true;
      return out;
    }
    previous = current;
  }
  return out;
}

double integrate_simpson(const std::function<double(double)>& f, double a, double b,
                         int intervals) {
  if (intervals < 2 || intervals % 2 != 0) {
    throw std::invalid_argument("Simpson rule needs an even number of intervals");
  }
  const double h = (b - a) / intervals;
  double acc = f(a) + f(b);
  for (int i = 1; i < intervals; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return acc * h / 3.0;
}

}  // namespace gexp
