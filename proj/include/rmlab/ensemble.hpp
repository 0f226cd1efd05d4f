#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rmlab/rng.hpp"
#include "rmlab/types.hpp"

namespace rmlab {

enum class LawFamily { RealGaussian, ComplexCircularGaussian, Rademacher, UniformSymmetric };

/// Centered entry distribution with E|A|^2 = 1.
struct EntryLaw {
  LawFamily family = LawFamily::RealGaussian;
  cplx second_moment{1.0, 0.0};  ///< E A^2
  bool sub_gaussian = true;

  static EntryLaw make(LawFamily family);

  /// Draws one entry, consuming the stream in a fixed pattern per family.
  cplx sample(Rng& rng) const;
};

std::string to_string(LawFamily family);
/// Accepts the names produced by to_string, e.g. "rademacher". Throws ConfigError.
LawFamily parse_law(std::string_view name);

/// One sparse matrix draw: X_ij = B_ij A_ij / sqrt(k), B_ij ~ Bernoulli(k/n).
struct EnsembleConfig {
  std::size_t n = 1;
  std::size_t k = 1;
  EntryLaw law{};
  std::uint64_t seed = 0;

  void validate() const;
};

/// Entries A^D = A 1{|A| <= D} - E[A 1{|A| <= D}] for a base law.
///
/// All four families are symmetric about the origin, so the centering term is
/// exactly zero; the truncated moments are computed in closed form.
class TruncatedLaw {
 public:
  TruncatedLaw(EntryLaw base, double d);

  cplx sample(Rng& rng) const;

  double threshold() const { return d_; }
  cplx centering() const { return centering_; }
  double abs_second_moment() const { return abs_second_moment_; }  ///< E|A^D|^2
  cplx second_moment() const { return second_moment_; }            ///< E (A^D)^2
  const EntryLaw& base() const { return base_; }

 private:
  EntryLaw base_;
  double d_;
  cplx centering_{0.0, 0.0};
  double abs_second_moment_ = 0.0;
  cplx second_moment_{0.0, 0.0};
};

TruncatedLaw truncated_law(const EntryLaw& law, double d);

/// Rank-r additive perturbation E = sum_t u_t v_t^*.
struct Deformation {
  std::vector<std::pair<ComplexVector, ComplexVector>> pairs;

  std::size_t rank() const { return pairs.size(); }
  std::size_t dim() const;
  /// sum_t (|u_t| + |v_t|)
  double norm_budget() const;
  /// Throws ConfigError when empty or when vector lengths disagree.
  void validate() const;
};

DenseComplexMatrix sample_iid_matrix(const EnsembleConfig& cfg);
DenseComplexMatrix sample_iid_matrix(const EnsembleConfig& cfg, const TruncatedLaw& law);

/// Real matrix with i.i.d. N(0, 1/n) entries.
DenseComplexMatrix sample_ginibre_real(std::size_t n, std::uint64_t seed);

DenseComplexMatrix deformation_matrix(const Deformation& defm);

/// The r x r matrix C with C(s, t) = <v_s, u_t> = v_s^* u_t. The nonzero
/// eigenvalues of E coincide with those of C, and det(I_n - zE) = det(I_r - zC).
DenseComplexMatrix reduced_matrix(const Deformation& defm);

/// Eigenvalues of reduced_matrix(defm); the remaining n - r eigenvalues of E are 0.
std::vector<cplx> deformation_eigenvalues(const Deformation& defm);

/// H(xi) = [[0, M - xi I], [(M - xi I)^*, 0]].
DenseComplexMatrix hermitize(const DenseComplexMatrix& m, cplx xi);

// Built-in deformation vectors.
ComplexVector basis_vector(std::size_t n, std::size_t index);
ComplexVector constant_vector(std::size_t n);  ///< all entries 1/sqrt(n)
ComplexVector random_unit_vector(std::size_t n, std::uint64_t seed);

Deformation rank_one(ComplexVector u, ComplexVector v);

/// sum_t theta_t a_t a_t^* with orthonormal random real a_t, so that the
/// nonzero spectrum of E is exactly {theta_t}.
Deformation spiked_deformation(std::size_t n, const std::vector<cplx>& thetas, std::uint64_t seed);

}  // namespace rmlab
