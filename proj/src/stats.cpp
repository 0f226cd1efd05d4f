#include "rmlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rmlab/types.hpp"

namespace rmlab {

double kolmogorov_tail(double x) {
  if (x <= 0.0) return 1.0;
  // The alternating series converges slowly for small x, where Q is 1 to
  // double precision anyway.
  if (x < 0.18) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-18) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.size() < 20 || b.size() < 20) throw ConfigError("ks_two_sample: both samples need at least 20 points");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  // Step through the merged order, consuming all copies of a tied value
  // before comparing the two empirical CDFs.
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  KsResult r;
  r.statistic = d;
  r.p_value = kolmogorov_tail(std::sqrt(na * nb / (na + nb)) * d);
  return r;
}

std::vector<bool> holm_reject(const std::vector<double>& p_values, double alpha) {
  const std::size_t m = p_values.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return p_values[x] < p_values[y]; });
  std::vector<bool> reject(m, false);
  for (std::size_t rank = 0; rank < m; ++rank) {
    if (p_values[order[rank]] <= alpha / static_cast<double>(m - rank))
      reject[order[rank]] = true;
    else
      break;
  }
  return reject;
}

Summary summarize_values(const std::vector<double>& values) {
  if (values.empty()) throw ConfigError("summary of an empty sample");
  Summary s;
  s.n = values.size();
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(s.n);
  if (s.n > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(s.n - 1));
  }
  const double half = 1.96 * s.std / std::sqrt(static_cast<double>(s.n));
  s.ci_low = s.mean - half;
  s.ci_high = s.mean + half;
  return s;
}

}  // namespace rmlab
