#include "rmlab/ensemble.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

namespace rmlab {

namespace {

constexpr double kSqrt3 = 1.7320508075688772;

}  // namespace

EntryLaw EntryLaw::make(LawFamily family) {
  EntryLaw law;
  law.family = family;
  law.sub_gaussian = true;
  law.second_moment = family == LawFamily::ComplexCircularGaussian ? cplx{0.0, 0.0} : cplx{1.0, 0.0};
  return law;
}

cplx EntryLaw::sample(Rng& rng) const {
  switch (family) {
    case LawFamily::RealGaussian:
      return {rng.normal(), 0.0};
    case LawFamily::ComplexCircularGaussian: {
      const double re = rng.normal();
      const double im = rng.normal();
      return cplx{re, im} * std::numbers::sqrt2 * 0.5;
    }
    case LawFamily::Rademacher:
      return {rng.uniform() < 0.5 ? 1.0 : -1.0, 0.0};
    case LawFamily::UniformSymmetric:
      return {rng.uniform(-kSqrt3, kSqrt3), 0.0};
  }
  return {};
}

std::string to_string(LawFamily family) {
  switch (family) {
    case LawFamily::RealGaussian: return "real_gaussian";
    case LawFamily::ComplexCircularGaussian: return "complex_gaussian";
    case LawFamily::Rademacher: return "rademacher";
    case LawFamily::UniformSymmetric: return "uniform";
  }
  return "unknown";
}

LawFamily parse_law(std::string_view name) {
  if (name == "real_gaussian" || name == "gaussian") return LawFamily::RealGaussian;
  if (name == "complex_gaussian") return LawFamily::ComplexCircularGaussian;
  if (name == "rademacher") return LawFamily::Rademacher;
  if (name == "uniform") return LawFamily::UniformSymmetric;
  throw ConfigError("unknown entry law '" + std::string(name) +
                    "' (expected real_gaussian, complex_gaussian, rademacher or uniform)");
}

void EnsembleConfig::validate() const {
  if (n == 0) throw ConfigError("matrix dimension n must be positive");
  if (k == 0 || k > n)
    throw ConfigError("sparsity parameter must satisfy 1 <= k <= n (got k=" + std::to_string(k) +
                      ", n=" + std::to_string(n) + ")");
}

TruncatedLaw::TruncatedLaw(EntryLaw base, double d) : base_(base), d_(d) {
  if (!(d > 0.0) || !std::isfinite(d)) throw ConfigError("truncation level must be positive and finite");
  switch (base_.family) {
    case LawFamily::RealGaussian: {
      // E[A^2 1{|A|<=d}] = P(|A|<=d) - 2 d phi(d)
      const double phi = std::exp(-0.5 * d * d) / std::sqrt(2.0 * std::numbers::pi);
      abs_second_moment_ = std::erf(d / std::numbers::sqrt2) - 2.0 * d * phi;
      second_moment_ = abs_second_moment_;
      break;
    }
    case LawFamily::ComplexCircularGaussian:
      // |A|^2 ~ Exp(1); the phase is uniform so E A^2 1{...} = 0.
      abs_second_moment_ = 1.0 - std::exp(-d * d) * (1.0 + d * d);
      second_moment_ = 0.0;
      break;
    case LawFamily::Rademacher:
      abs_second_moment_ = d >= 1.0 ? 1.0 : 0.0;
      second_moment_ = abs_second_moment_;
      break;
    case LawFamily::UniformSymmetric:
      abs_second_moment_ = d >= kSqrt3 ? 1.0 : d * d * d / (3.0 * kSqrt3);
      second_moment_ = abs_second_moment_;
      break;
  }
}

cplx TruncatedLaw::sample(Rng& rng) const {
  const cplx a = base_.sample(rng);
  return (std::abs(a) <= d_ ? a : cplx{0.0, 0.0}) - centering_;
}

TruncatedLaw truncated_law(const EntryLaw& law, double d) { return TruncatedLaw(law, d); }

std::size_t Deformation::dim() const { return pairs.empty() ? 0 : static_cast<std::size_t>(pairs.front().first.size()); }

double Deformation::norm_budget() const {
  double total = 0.0;
  for (const auto& [u, v] : pairs) total += u.norm() + v.norm();
  return total;
}

void Deformation::validate() const {
  if (pairs.empty()) throw ConfigError("deformation has no (u, v) pairs");
  const auto n = pairs.front().first.size();
  if (n == 0) throw ConfigError("deformation vectors are empty");
  for (std::size_t t = 0; t < pairs.size(); ++t) {
    if (pairs[t].first.size() != n || pairs[t].second.size() != n)
      throw ConfigError("deformation pair " + std::to_string(t) + " has mismatched vector length");
  }
  if (!std::isfinite(norm_budget())) throw ConfigError("deformation vectors contain non-finite values");
}

namespace {

template <class Sampler>
DenseComplexMatrix sample_sparse(const EnsembleConfig& cfg, const Sampler& law) {
  cfg.validate();
  const auto n = static_cast<Eigen::Index>(cfg.n);
  const double p = static_cast<double>(cfg.k) / static_cast<double>(cfg.n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(cfg.k));
  DenseComplexMatrix x = DenseComplexMatrix::Zero(n, n);
  Rng rng(cfg.seed);
  // One stream, row-major: mask draw, then the entry value when the mask is on.
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (rng.bernoulli(p)) x(i, j) = scale * law.sample(rng);
    }
  }
  return x;
}

}  // namespace

DenseComplexMatrix sample_iid_matrix(const EnsembleConfig& cfg) { return sample_sparse(cfg, cfg.law); }

DenseComplexMatrix sample_iid_matrix(const EnsembleConfig& cfg, const TruncatedLaw& law) {
  return sample_sparse(cfg, law);
}

DenseComplexMatrix sample_ginibre_real(std::size_t n, std::uint64_t seed) {
  if (n == 0) throw ConfigError("matrix dimension n must be positive");
  const auto dim = static_cast<Eigen::Index>(n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  DenseComplexMatrix g(dim, dim);
  Rng rng(seed);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) g(i, j) = scale * rng.normal();
  return g;
}

DenseComplexMatrix deformation_matrix(const Deformation& defm) {
  defm.validate();
  const auto n = static_cast<Eigen::Index>(defm.dim());
  DenseComplexMatrix e = DenseComplexMatrix::Zero(n, n);
  for (const auto& [u, v] : defm.pairs) e.noalias() += u * v.adjoint();
  return e;
}

DenseComplexMatrix reduced_matrix(const Deformation& defm) {
  defm.validate();
  const auto r = static_cast<Eigen::Index>(defm.rank());
  DenseComplexMatrix c(r, r);
  for (Eigen::Index s = 0; s < r; ++s)
    for (Eigen::Index t = 0; t < r; ++t) c(s, t) = defm.pairs[s].second.dot(defm.pairs[t].first);
  return c;
}

std::vector<cplx> deformation_eigenvalues(const Deformation& defm) {
  const Eigen::MatrixXcd c = reduced_matrix(defm);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(c, false);
  if (solver.info() != Eigen::Success) throw NumericalError("eigensolver failed on the reduced deformation matrix");
  const auto& ev = solver.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

DenseComplexMatrix hermitize(const DenseComplexMatrix& m, cplx xi) {
  if (m.rows() != m.cols()) throw ConfigError("hermitize requires a square matrix");
  const auto n = m.rows();
  DenseComplexMatrix shifted = m;
  shifted.diagonal().array() -= xi;
  DenseComplexMatrix h = DenseComplexMatrix::Zero(2 * n, 2 * n);
  h.topRightCorner(n, n) = shifted;
  h.bottomLeftCorner(n, n) = shifted.adjoint();
  return h;
}

ComplexVector basis_vector(std::size_t n, std::size_t index) {
  if (index >= n) throw ConfigError("basis vector index out of range");
  ComplexVector e = ComplexVector::Zero(static_cast<Eigen::Index>(n));
  e(static_cast<Eigen::Index>(index)) = 1.0;
  return e;
}

ComplexVector constant_vector(std::size_t n) {
  if (n == 0) throw ConfigError("vector length must be positive");
  return ComplexVector::Constant(static_cast<Eigen::Index>(n), cplx{1.0 / std::sqrt(static_cast<double>(n)), 0.0});
}

ComplexVector random_unit_vector(std::size_t n, std::uint64_t seed) {
  if (n == 0) throw ConfigError("vector length must be positive");
  Rng rng(seed);
  ComplexVector x(static_cast<Eigen::Index>(n));
  for (auto& c : x) c = rng.normal();
  return x / x.norm();
}

Deformation rank_one(ComplexVector u, ComplexVector v) {
  Deformation d;
  d.pairs.emplace_back(std::move(u), std::move(v));
  d.validate();
  return d;
}

Deformation spiked_deformation(std::size_t n, const std::vector<cplx>& thetas, std::uint64_t seed) {
  if (thetas.empty()) throw ConfigError("spiked deformation needs at least one eigenvalue");
  if (thetas.size() > n) throw ConfigError("rank exceeds dimension");
  std::vector<ComplexVector> basis;
  for (std::size_t t = 0; t < thetas.size(); ++t) {
    ComplexVector a = random_unit_vector(n, derive_seed(seed, t, "spike"));
    // Gram-Schmidt, applied twice.
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& b : basis) a -= b * b.dot(a);
    basis.push_back(a / a.norm());
  }
  Deformation d;
  for (std::size_t t = 0; t < thetas.size(); ++t) d.pairs.emplace_back(thetas[t] * basis[t], basis[t]);
  return d;
}

}  // namespace rmlab
