#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "rmlab/outliers.hpp"

using namespace rmlab;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<cplx> random_set(Rng& rng) {
  std::vector<cplx> s(1 + rng.next_u64() % 5);
  for (auto& z : s) z = {rng.uniform(-3, 3), rng.uniform(-3, 3)};
  return s;
}

// Brute-force oracle over all pairs, written independently of the library.
double hausdorff_oracle(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double best = 0.0;
  for (auto p : a) {
    double d = kInf;
    for (auto q : b) d = std::fmin(d, std::hypot(p.real() - q.real(), p.imag() - q.imag()));
    best = std::fmax(best, d);
  }
  for (auto q : b) {
    double d = kInf;
    for (auto p : a) d = std::fmin(d, std::hypot(p.real() - q.real(), p.imag() - q.imag()));
    best = std::fmax(best, d);
  }
  return best;
}

EnsembleConfig sparse(std::size_t n, std::size_t k, std::uint64_t seed) {
  return EnsembleConfig{n, k, EntryLaw::make(LawFamily::Rademacher), seed};
}

}  // namespace

TEST_CASE("outlier sets") {
  CHECK(outlier_set(std::vector<cplx>{0.5, 2.0}, 0.25) == std::vector<cplx>{2.0});
  CHECK(outlier_set(std::vector<cplx>{1.2, 1.3}, 0.5).empty());
  CHECK(outlier_set(std::vector<cplx>{1.25}, 0.25) == std::vector<cplx>{1.25});  // boundary is included
  CHECK_THROWS_AS(outlier_set(std::vector<cplx>{1.0}, 0.0), ConfigError);
}

TEST_CASE("Hausdorff distance examples") {
  CHECK(hausdorff({1.0}, {1.0}) == 0.0);
  CHECK(hausdorff({0.0}, {3.0, cplx(0, 4)}) == 4.0);
  CHECK(hausdorff({}, {2.0}) == kInf);
  CHECK(hausdorff({2.0}, {}) == kInf);
  CHECK(hausdorff({}, {}) == 0.0);
}

TEST_CASE("Hausdorff distance is a metric on finite sets") {
  Rng rng(2024);
  for (int i = 0; i < 1000; ++i) {
    const auto a = random_set(rng), b = random_set(rng), c = random_set(rng);
    const double ab = hausdorff(a, b), bc = hausdorff(b, c), ac = hausdorff(a, c);
    CHECK(ab == hausdorff(b, a));
    CHECK(ab >= 0.0);
    CHECK(ac <= ab + bc + 1e-12);
    CHECK(std::abs(ab - hausdorff_oracle(a, b)) < 1e-12);
    CHECK(hausdorff(a, a) == 0.0);
    // Duplicates and order do not matter.
    auto shuffled = a;
    std::reverse(shuffled.begin(), shuffled.end());
    shuffled.push_back(a.front());
    CHECK(hausdorff(a, shuffled) == 0.0);
    if (hausdorff(a, b) == 0.0) CHECK(hausdorff_oracle(a, b) == 0.0);
  }
}

TEST_CASE("default eps and outlier reports") {
  CHECK(default_eps({2.0, {1.5, 0.8}, 0.3}) == doctest::Approx(0.25 * (std::abs(cplx(1.5, 0.8)) - 1.0)));
  CHECK_THROWS_AS(default_eps({0.5}), DomainError);

  ComplexSpectrum s;
  s.values = {0.1, 0.9, 2.05, cplx(1.45, 0.85)};
  const auto r = outlier_report(s, {2.0, {1.5, 0.8}, 0.0}, 0.25);
  CHECK(r.count_match);
  CHECK(r.predicted.size() == 2);
  CHECK(r.hausdorff == doctest::Approx(std::abs(cplx(-0.05, 0.05))));
  const auto j = to_json(r);
  for (const char* key : {"eps", "observed", "predicted", "hausdorff", "count_match"}) CHECK(j.contains(key));

  s.values = {0.1};
  const auto empty = outlier_report(s, {2.0}, 0.25);
  CHECK_FALSE(empty.count_match);
  CHECK(to_json(empty)["hausdorff"] == "inf");
}

TEST_CASE("secular function closed forms") {
  const DenseComplexMatrix zero = DenseComplexMatrix::Zero(2, 2);
  const ComplexVector u = 2.0 * basis_vector(2, 0);
  const ComplexVector e1 = basis_vector(2, 0);
  CHECK(std::abs(secular_value(zero, 1.5, u, e1) - (1.0 - 2.0 / 1.5)) < 1e-15);
  CHECK(std::abs(secular_value(zero, 2.0, u, e1)) < 1e-15);
  DenseComplexMatrix d = DenseComplexMatrix::Zero(2, 2);
  d(0, 0) = 0.5;
  CHECK(std::abs(secular_value(d, 2.0, e1, e1) - (1.0 + 1.0 / (0.5 - 2.0))) < 1e-15);
  CHECK_THROWS_AS(secular_value(d, 0.5, e1, e1), NumericalError);
  CHECK_THROWS_AS(secular_value(d, 2.0, basis_vector(3, 0), e1), ConfigError);
}

TEST_CASE("secular roots") {
  const DenseComplexMatrix zero = DenseComplexMatrix::Zero(2, 2);
  const auto root = secular_root(zero, 2.0 * basis_vector(2, 0), basis_vector(2, 0), 1.8);
  CHECK(std::abs(root.z - 2.0) < 1e-10);
  CHECK_FALSE(root.inside_unit_disk);
  CHECK_THROWS_AS(secular_root(zero, basis_vector(2, 0), basis_vector(2, 0), 0.5), DomainError);

  SUBCASE("matches the dense outlier") {
    const auto x = sample_iid_matrix(sparse(200, 20, 1));
    const auto defm = spiked_deformation(200, {3.0}, 2);
    const auto& [u, v] = defm.pairs[0];
    const auto out = outlier_set(eig(x + deformation_matrix(defm)), 0.5);
    REQUIRE(out.size() == 1);
    const auto r = secular_root(x, u, v, 3.0);
    CHECK(std::abs(r.z - out[0]) < 1e-6);
    CHECK(r.residual <= 1e-10);
  }

  SUBCASE("complex <v, u> lands near its prediction") {
    const cplx theta(1.5, 1.5);
    int close = 0;
    constexpr int trials = 30;
    for (int t = 0; t < trials; ++t) {
      const auto x = sample_iid_matrix(sparse(200, 200, 100 + t));
      const auto defm = spiked_deformation(200, {theta}, 500 + t);
      try {
        const auto r = secular_root(x, defm.pairs[0].first, defm.pairs[0].second, theta);
        close += std::abs(r.z - theta) <= 0.2 ? 1 : 0;
      } catch (const NumericalError&) {
      }
    }
    CHECK(close >= 0.9 * trials);
  }
}

TEST_CASE("predicted overlap") {
  CHECK(predicted_overlap(2.0) == 0.75);
  CHECK(predicted_overlap(cplx(0, 3)) == doctest::Approx(8.0 / 9.0).epsilon(1e-15));
  CHECK_THROWS_AS(predicted_overlap(1.0), DomainError);
  CHECK_THROWS_AS(predicted_overlap(cplx(0.6, 0.8)), DomainError);
}

TEST_CASE("eigenvector overlap") {
  SUBCASE("X = 0: the eigenvector is u itself") {
    const auto u = random_unit_vector(8, 3);
    const DenseComplexMatrix y = 2.0 * u * u.adjoint();
    const auto r = eigvec_overlap(y, 2.0 * u, u, 0.25);
    CHECK(r.overlap_sq == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.predicted == doctest::Approx(0.75).epsilon(1e-14));
    CHECK(std::abs(r.lambda_max - 2.0) < 1e-12);
    const auto j = to_json(r);
    CHECK(j["predicted"].get<double>() == doctest::Approx(0.75).epsilon(1e-14));
  }
  SUBCASE("non-normal rank one") {
    // Y = u v^* has right eigenvector u regardless of v.
    ComplexVector u = random_unit_vector(6, 1) * 3.0;
    ComplexVector v = basis_vector(6, 0) + basis_vector(6, 1) * cplx(0, 1);
    const DenseComplexMatrix y = u * v.adjoint();
    const auto r = eigvec_overlap(y, u, v, 0.1);
    CHECK(std::abs(r.lambda_max - v.dot(u)) < 1e-12);
    CHECK(r.overlap_sq == doctest::Approx(1.0).epsilon(1e-10));
  }
  SUBCASE("matches a dense eigenvector oracle") {
    const auto x = sample_iid_matrix(EnsembleConfig{120, 120, EntryLaw::make(LawFamily::RealGaussian), 9});
    const auto defm = spiked_deformation(120, {2.5}, 4);
    const auto& [u, v] = defm.pairs[0];
    const DenseComplexMatrix y = x + deformation_matrix(defm);
    const auto r = eigvec_overlap(y, u, v, 0.3);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(y);
    Eigen::Index best = 0;
    solver.eigenvalues().cwiseAbs().maxCoeff(&best);
    const Eigen::VectorXcd vec = solver.eigenvectors().col(best).normalized();
    const double expect = std::norm(vec.dot(u)) / u.squaredNorm();
    CHECK(std::abs(r.overlap_sq - expect) < 1e-8);
    CHECK(r.residual <= 1e-8 * y.colwise().norm().maxCoeff());
  }
  SUBCASE("degenerate outlier counts") {
    const DenseComplexMatrix y = DenseComplexMatrix::Identity(4, 4) * 0.5;
    const auto u = basis_vector(4, 0);
    try {
      eigvec_overlap(y, u, u, 0.25);
      FAIL("expected DegenerateOutlierError");
    } catch (const DegenerateOutlierError& e) {
      CHECK(e.count() == 0);
    }
    DenseComplexMatrix two = DenseComplexMatrix::Zero(4, 4);
    two(0, 0) = 2.0;
    two(1, 1) = -3.0;
    CHECK_THROWS_AS(eigvec_overlap(two, u, u, 0.25), DegenerateOutlierError);
  }
}
