#pragma once

#include <vector>

namespace rmlab {

struct KsResult {
  double statistic = 0.0;  ///< sup |F_a - F_b|
  double p_value = 1.0;
};

/// Two-sample Kolmogorov-Smirnov test. The p-value is the asymptotic
/// Kolmogorov tail Q(sqrt(mn/(m+n)) D). Both samples need at least 20 points.
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

/// Kolmogorov distribution tail Q(x) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 x^2).
double kolmogorov_tail(double x);

/// Holm step-down: returns per-hypothesis rejection decisions at family level alpha.
std::vector<bool> holm_reject(const std::vector<double>& p_values, double alpha);

struct Summary {
  double mean = 0.0;
  double std = 0.0;  ///< sample standard deviation (n - 1 denominator; 0 when n = 1)
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t n = 0;
};

/// Mean, sample std and the normal-approximation CI95 mean +- 1.96 std / sqrt(n).
Summary summarize_values(const std::vector<double>& values);

}  // namespace rmlab
