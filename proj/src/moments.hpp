// Sample-moment accumulator shared by the Monte Carlo modules.
#pragma once

#include <algorithm>
#include <cmath>

namespace gexp::detail {

// Plain ordered sum for the mean (monotone under rounding, so the estimator
// axioms hold exactly) and Welford/Chan for the second moment.
struct Moments {
  double n = 0.0;
  double sum = 0.0;
  double running_mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    n += 1.0;
    sum += x;
    double delta = x - running_mean;
    running_mean += delta / n;
    m2 += delta * (x - running_mean);
  }
  void merge(const Moments& o) {
    if (o.n == 0.0) return;
    if (n == 0.0) {
      *this = o;
      return;
    }
    double total = n + o.n;
    double delta = o.running_mean - running_mean;
    running_mean += delta * o.n / total;
    m2 += o.m2 + delta * delta * n * o.n / total;
    sum += o.sum;
    n = total;
  }
  double mean() const { return n > 0.0 ? sum / n : 0.0; }
  double std_error() const { return n > 1.0 ? std::sqrt(std::max(m2, 0.0) / (n - 1.0) / n) : 0.0; }
};

}  // namespace gexp::detail
