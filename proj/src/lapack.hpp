#pragma once

// Thin RAII layer over the LAPACKE routines used by the library. Internal.

#include <vector>

#include "rmlab/types.hpp"

namespace rmlab::lapack {

/// Pins OpenBLAS to one thread so results do not depend on the thread count.
void use_single_thread();

/// Returns true when every entry has a zero imaginary part.
bool is_real(const DenseComplexMatrix& m);

struct EigResult {
  std::vector<cplx> values;
  int info = 0;
};

/// Eigenvalues only; dgeev when the input is real, zgeev otherwise.
EigResult eigenvalues(const DenseComplexMatrix& m);

struct SvdResult {
  std::vector<double> values;  // nonincreasing
  int info = 0;
};

SvdResult singular_values(const DenseComplexMatrix& m);

/// LU factorization with partial pivoting of a square matrix.
class LuFactor {
 public:
  explicit LuFactor(DenseComplexMatrix a);

  /// LAPACK info > 0 means an exactly zero pivot.
  bool singular() const { return info_ > 0; }
  /// Reciprocal 1-norm condition estimate (zgecon).
  double rcond() const { return rcond_; }

  ComplexVector solve(const ComplexVector& b) const;
  /// Solves A^* x = b.
  ComplexVector solve_adjoint(const ComplexVector& b) const;

 private:
  DenseComplexMatrix lu_;
  std::vector<int> pivots_;
  int info_ = 0;
  double rcond_ = 0.0;
};

/// Cholesky factor of a Hermitian positive definite matrix (lower triangle used).
class CholeskyFactor {
 public:
  explicit CholeskyFactor(DenseComplexMatrix a);
  bool ok() const { return info_ == 0; }
  ComplexVector solve(const ComplexVector& b) const;

 private:
  DenseComplexMatrix l_;
  int info_ = 0;
};

}  // namespace rmlab::lapack
