#pragma once

#include <string>
#include <vector>

#include "rmlab/types.hpp"

namespace rmlab {

/// Relative backward-error tolerance of the dense eigensolver.
inline constexpr double kEigTolerance = 1e-8;

/// Eigenvalues of an n x n matrix, as a multiset (order unspecified).
struct ComplexSpectrum {
  std::vector<cplx> values;
  /// Relative residual of the trace identities tr M = sum lambda and
  /// tr M^2 = sum lambda^2, normalised by n |M|_F and n |M|_F^2.
  double backward_error = 0.0;
  std::size_t source_dim = 0;
  bool flagged = false;
  std::string diagnostic;

  std::size_t size() const { return values.size(); }
};

/// Nonincreasing singular values; the least singular value is the last entry.
struct SingularSpectrum {
  std::vector<double> values;
  bool flagged = false;
  std::string diagnostic;

  double smallest() const { return values.back(); }
  double largest() const { return values.front(); }
};

/// All eigenvalues through Hessenberg reduction and shifted QR (LAPACK geev).
/// Non-convergence or a backward error above kEigTolerance * n marks the
/// result as flagged instead of throwing.
ComplexSpectrum eig(const DenseComplexMatrix& m);

double spectral_radius(const ComplexSpectrum& s);

SingularSpectrum singular_values(const DenseComplexMatrix& m);

/// For each radius r (sorted, positive) the fraction of eigenvalues with |lambda| <= r.
std::vector<double> esd_radial_fractions(const ComplexSpectrum& s, const std::vector<double>& radii);

/// q^* (h - zI)^{-1} w for Hermitian h and Im z > 0, through one LU solve.
cplx resolvent_bilinear(const DenseComplexMatrix& h, cplx z, const ComplexVector& w, const ComplexVector& q);

/// Same quantity for h = hermitize(x, xi), z = i eta and w, q supported on the
/// first n coordinates (given as length-n vectors). The upper-left block of
/// (h - i eta)^{-1} equals i eta (M M^* + eta^2)^{-1} with M = x - xi I, so a
/// single n x n Cholesky solve replaces the 2n x 2n LU.
cplx hermitized_resolvent_bilinear(const DenseComplexMatrix& x, cplx xi, double eta, const ComplexVector& w,
                                   const ComplexVector& q);

}  // namespace rmlab
