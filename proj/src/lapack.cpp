#include "lapack.hpp"

#include <lapacke.h>

extern "C" void openblas_set_num_threads(int num_threads);

namespace rmlab::lapack {

namespace {

lapack_complex_double* as_lapack(cplx* p) { return reinterpret_cast<lapack_complex_double*>(p); }

lapack_int to_int(Eigen::Index n) { return static_cast<lapack_int>(n); }

}  // namespace

void use_single_thread() { openblas_set_num_threads(1); }

bool is_real(const DenseComplexMatrix& m) {
  for (Eigen::Index i = 0; i < m.size(); ++i)
    if (m.data()[i].imag() != 0.0) return false;
  return true;
}

// The row-major buffer is handed to LAPACK as the column-major transpose.
// Eigenvalues and singular values are unchanged, and no workspace arrays for
// the (unused) vectors are needed.

EigResult eigenvalues(const DenseComplexMatrix& m) {
  const auto n = to_int(m.rows());
  EigResult out;
  if (is_real(m)) {
    std::vector<double> a(static_cast<std::size_t>(m.size()));
    for (Eigen::Index i = 0; i < m.size(); ++i) a[static_cast<std::size_t>(i)] = m.data()[i].real();
    std::vector<double> wr(static_cast<std::size_t>(n)), wi(static_cast<std::size_t>(n));
    out.info = LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', 'N', n, a.data(), n, wr.data(), wi.data(), nullptr, 1, nullptr, 1);
    out.values.resize(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] = {wr[i], wi[i]};
  } else {
    DenseComplexMatrix a = m;
    out.values.resize(static_cast<std::size_t>(n));
    out.info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'N', n, as_lapack(a.data()), n, as_lapack(out.values.data()),
                             nullptr, 1, nullptr, 1);
  }
  return out;
}

SvdResult singular_values(const DenseComplexMatrix& m) {
  const auto rows = to_int(m.rows());
  const auto cols = to_int(m.cols());
  SvdResult out;
  out.values.resize(static_cast<std::size_t>(std::min(rows, cols)));
  if (is_real(m)) {
    std::vector<double> a(static_cast<std::size_t>(m.size()));
    for (Eigen::Index i = 0; i < m.size(); ++i) a[static_cast<std::size_t>(i)] = m.data()[i].real();
    out.info = LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'N', cols, rows, a.data(), cols, out.values.data(), nullptr, 1,
                              nullptr, 1);
  } else {
    DenseComplexMatrix a = m;
    out.info = LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'N', cols, rows, as_lapack(a.data()), cols, out.values.data(),
                              nullptr, 1, nullptr, 1);
  }
  return out;
}

LuFactor::LuFactor(DenseComplexMatrix a) : lu_(std::move(a)) {
  if (lu_.rows() != lu_.cols()) throw ConfigError("LU factorization requires a square matrix");
  const auto n = to_int(lu_.rows());
  const double anorm = lu_.cwiseAbs().colwise().sum().maxCoeff();
  pivots_.resize(static_cast<std::size_t>(n));
  info_ = LAPACKE_zgetrf(LAPACK_ROW_MAJOR, n, n, as_lapack(lu_.data()), n, pivots_.data());
  if (info_ < 0) throw NumericalError("zgetrf: illegal argument");
  if (info_ == 0) {
    if (LAPACKE_zgecon(LAPACK_ROW_MAJOR, '1', n, as_lapack(lu_.data()), n, anorm, &rcond_) != 0)
      throw NumericalError("zgecon failed");
  }
}

ComplexVector LuFactor::solve(const ComplexVector& b) const {
  if (singular()) throw NumericalError("solve with a singular LU factorization");
  if (b.size() != lu_.rows()) throw ConfigError("right-hand side has the wrong length");
  ComplexVector x = b;
  const auto n = to_int(lu_.rows());
  // LAPACKE's row-major path transposes internally; const_cast is safe since
  // getrs does not modify the factors.
  auto* a = const_cast<cplx*>(lu_.data());
  if (LAPACKE_zgetrs(LAPACK_ROW_MAJOR, 'N', n, 1, as_lapack(a), n, pivots_.data(), as_lapack(x.data()), 1) != 0)
    throw NumericalError("zgetrs failed");
  return x;
}

ComplexVector LuFactor::solve_adjoint(const ComplexVector& b) const {
  if (singular()) throw NumericalError("solve with a singular LU factorization");
  if (b.size() != lu_.rows()) throw ConfigError("right-hand side has the wrong length");
  ComplexVector x = b;
  const auto n = to_int(lu_.rows());
  auto* a = const_cast<cplx*>(lu_.data());
  if (LAPACKE_zgetrs(LAPACK_ROW_MAJOR, 'C', n, 1, as_lapack(a), n, pivots_.data(), as_lapack(x.data()), 1) != 0)
    throw NumericalError("zgetrs failed");
  return x;
}

CholeskyFactor::CholeskyFactor(DenseComplexMatrix a) : l_(std::move(a)) {
  if (l_.rows() != l_.cols()) throw ConfigError("Cholesky factorization requires a square matrix");
  const auto n = to_int(l_.rows());
  info_ = LAPACKE_zpotrf(LAPACK_ROW_MAJOR, 'L', n, as_lapack(l_.data()), n);
}

ComplexVector CholeskyFactor::solve(const ComplexVector& b) const {
  if (!ok()) throw NumericalError("solve with a failed Cholesky factorization");
  ComplexVector x = b;
  const auto n = to_int(l_.rows());
  auto* a = const_cast<cplx*>(l_.data());
  if (LAPACKE_zpotrs(LAPACK_ROW_MAJOR, 'L', n, 1, as_lapack(a), n, as_lapack(x.data()), 1) != 0)
    throw NumericalError("zpotrs failed");
  return x;
}

}  // namespace rmlab::lapack
