#include <doctest.h>

#include <cmath>
#include <vector>

#include "rmlab/rng.hpp"
#include "rmlab/stats.hpp"
#include "rmlab/types.hpp"

using namespace rmlab;

TEST_CASE("KS statistic on degenerate samples") {
  std::vector<double> a(100);
  for (int i = 0; i < 100; ++i) a[i] = std::sin(i);
  const auto same = ks_two_sample(a, a);
  CHECK(same.statistic == 0.0);
  CHECK(same.p_value == 1.0);

  const auto apart = ks_two_sample(std::vector<double>(100, 0.0), std::vector<double>(100, 1.0));
  CHECK(apart.statistic == 1.0);
  CHECK(apart.p_value < 1e-10);

  CHECK_THROWS_AS(ks_two_sample(std::vector<double>(19, 0.0), a), ConfigError);
}

TEST_CASE("KS statistic and asymptotic p-value against SciPy") {
  // scipy.stats.ks_2samp gives D = 0.17 on these samples;
  // scipy.special.kolmogorov(sqrt(40 * 50 / 90) * D) = 0.5418862776016817.
  std::vector<double> a, b;
  for (int i = 1; i <= 40; ++i) a.push_back(std::fmod(i * 0.618034, 1.0));
  for (int i = 1; i <= 50; ++i) b.push_back(std::fmod(i * 0.414214, 1.0) * 1.1 + 0.05);
  const auto r = ks_two_sample(a, b);
  CHECK(r.statistic == doctest::Approx(0.17).epsilon(1e-12));
  CHECK(r.p_value == doctest::Approx(0.5418862776016817).epsilon(1e-9));
}

TEST_CASE("ties are handled as one step") {
  std::vector<double> a(30, 1.0), b(30, 1.0);
  b[0] = 2.0;
  // F_a jumps to 1 at x = 1 while F_b reaches 29/30.
  CHECK(ks_two_sample(a, b).statistic == doctest::Approx(1.0 / 30.0));
}

TEST_CASE("Kolmogorov tail against SciPy") {
  // scipy.special.kolmogorov
  CHECK(kolmogorov_tail(0.5) == doctest::Approx(0.9639452436648751).epsilon(1e-12));
  CHECK(kolmogorov_tail(1.0) == doctest::Approx(0.26999967167735456).epsilon(1e-12));
  CHECK(kolmogorov_tail(1.36) == doctest::Approx(0.049485876755377876).epsilon(1e-12));
  CHECK(kolmogorov_tail(2.0) == doctest::Approx(0.0006709252557796953).epsilon(1e-12));
  CHECK(kolmogorov_tail(0.0) == 1.0);
  CHECK(kolmogorov_tail(0.1) == 1.0);
}

TEST_CASE("KS rejection rate under the null") {
  Rng rng(99);
  constexpr int reps = 1000;
  int rejections = 0;
  for (int r = 0; r < reps; ++r) {
    std::vector<double> a(500), b(500);
    for (auto& x : a) x = rng.normal();
    for (auto& x : b) x = rng.normal();
    rejections += ks_two_sample(a, b).p_value < 0.05 ? 1 : 0;
  }
  // Binomial(1000, 0.05) has sd 6.9; the asymptotic p-value is slightly
  // conservative at n = 500.
  CHECK(rejections >= 50 - 4 * 7);
  CHECK(rejections <= 50 + 4 * 7);
}

TEST_CASE("Holm step-down") {
  const auto r = holm_reject({0.01, 0.04, 0.03, 0.005}, 0.05);
  CHECK(r == std::vector<bool>{true, false, false, true});
  CHECK(holm_reject({0.2, 0.3}, 0.05) == std::vector<bool>{false, false});
  CHECK(holm_reject({0.001, 0.02}, 0.05) == std::vector<bool>{true, true});
  CHECK(holm_reject({}, 0.05).empty());
}

TEST_CASE("summaries") {
  const auto c = summarize_values(std::vector<double>(10, 3.0));
  CHECK(c.mean == 3.0);
  CHECK(c.std == 0.0);
  CHECK(c.ci_low == 3.0);
  CHECK(c.ci_high == 3.0);
  CHECK(c.n == 10);

  const auto two = summarize_values({1.0, 3.0});
  CHECK(two.mean == 2.0);
  CHECK(two.std == doctest::Approx(std::sqrt(2.0)));
  CHECK(two.ci_high - two.mean == doctest::Approx(1.96 * std::sqrt(2.0) / std::sqrt(2.0)));

  const auto one = summarize_values({5.0});
  CHECK(one.std == 0.0);
  CHECK_THROWS_AS(summarize_values({}), ConfigError);
}
