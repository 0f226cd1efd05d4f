#include "rmlab/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lapack.hpp"

namespace rmlab {

ComplexSpectrum eig(const DenseComplexMatrix& m) {
  if (m.rows() != m.cols()) throw ConfigError("eig requires a square matrix");
  if (m.size() == 0) throw ConfigError("eig requires a nonempty matrix");
  if (!m.allFinite()) throw ConfigError("eig: matrix has non-finite entries");

  ComplexSpectrum s;
  s.source_dim = static_cast<std::size_t>(m.rows());
  auto result = lapack::eigenvalues(m);
  s.values = std::move(result.values);
  if (result.info > 0) {
    s.flagged = true;
    s.diagnostic = "QR iteration failed to converge (geev info=" + std::to_string(result.info) + ")";
    // Only eigenvalues info..n-1 are valid; the rest are not reported as numbers.
    for (int i = 0; i < result.info; ++i) s.values[static_cast<std::size_t>(i)] = std::numeric_limits<double>::quiet_NaN();
    s.backward_error = std::numeric_limits<double>::infinity();
    return s;
  }

  const double fro = m.norm();
  if (fro == 0.0) return s;
  const cplx trace = m.trace();
  cplx trace_sq = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) trace_sq += m(i, j) * m(j, i);
  cplx sum1 = 0.0, sum2 = 0.0;
  for (const auto& l : s.values) {
    sum1 += l;
    sum2 += l * l;
  }
  const double n = static_cast<double>(s.source_dim);
  s.backward_error = std::max(std::abs(sum1 - trace) / (n * fro), std::abs(sum2 - trace_sq) / (n * fro * fro));
  if (!(s.backward_error <= kEigTolerance)) {
    s.flagged = true;
    s.diagnostic = "trace-identity residual " + std::to_string(s.backward_error) + " above tolerance";
  }
  return s;
}

double spectral_radius(const ComplexSpectrum& s) {
  if (s.values.empty()) throw ConfigError("spectral radius of an empty spectrum");
  double rho = 0.0;
  for (const auto& l : s.values) rho = std::max(rho, std::abs(l));
  return rho;
}

SingularSpectrum singular_values(const DenseComplexMatrix& m) {
  if (m.size() == 0) throw ConfigError("singular values of an empty matrix");
  if (!m.allFinite()) throw ConfigError("singular_values: matrix has non-finite entries");
  auto result = lapack::singular_values(m);
  SingularSpectrum s;
  s.values = std::move(result.values);
  if (result.info > 0) {
    s.flagged = true;
    s.diagnostic = "divide-and-conquer SVD failed to converge (gesdd info=" + std::to_string(result.info) + ")";
  }
  std::sort(s.values.begin(), s.values.end(), std::greater<>());
  return s;
}

std::vector<double> esd_radial_fractions(const ComplexSpectrum& s, const std::vector<double>& radii) {
  if (s.values.empty()) throw ConfigError("radial fractions of an empty spectrum");
  std::vector<double> moduli;
  moduli.reserve(s.values.size());
  for (const auto& l : s.values) moduli.push_back(std::abs(l));
  std::sort(moduli.begin(), moduli.end());
  std::vector<double> out;
  out.reserve(radii.size());
  for (double r : radii) {
    if (!(r > 0.0)) throw ConfigError("radii must be positive");
    const auto count = std::upper_bound(moduli.begin(), moduli.end(), r) - moduli.begin();
    out.push_back(static_cast<double>(count) / static_cast<double>(moduli.size()));
  }
  return out;
}

cplx resolvent_bilinear(const DenseComplexMatrix& h, cplx z, const ComplexVector& w, const ComplexVector& q) {
  if (h.rows() != h.cols()) throw ConfigError("resolvent requires a square matrix");
  if (w.size() != h.rows() || q.size() != h.rows()) throw ConfigError("resolvent: vector dimension mismatch");
  if (!(z.imag() > 0.0)) throw DomainError("resolvent: Im z must be positive");
  DenseComplexMatrix shifted = h;
  shifted.diagonal().array() -= z;
  const lapack::LuFactor lu(shifted);
  if (lu.singular()) throw NumericalError("resolvent: singular system (is h Hermitian?)");
  const ComplexVector x = lu.solve(w);
  DenseComplexMatrix check = h;
  check.diagonal().array() -= z;
  const double residual = (check * x - w).norm();
  if (residual > 1e-10 * std::max(1.0, w.norm()))
    throw NumericalError("resolvent: solve residual " + std::to_string(residual) + " above 1e-10");
  return q.dot(x);
}

cplx hermitized_resolvent_bilinear(const DenseComplexMatrix& x, cplx xi, double eta, const ComplexVector& w,
                                   const ComplexVector& q) {
  if (x.rows() != x.cols()) throw ConfigError("hermitized resolvent requires a square matrix");
  if (w.size() != x.rows() || q.size() != x.rows()) throw ConfigError("resolvent: vector dimension mismatch");
  if (!(eta > 0.0)) throw DomainError("resolvent: eta must be positive");
  DenseComplexMatrix shifted = x;
  shifted.diagonal().array() -= xi;
  DenseComplexMatrix gram(x.rows(), x.cols());
  gram.setZero();
  gram.selfadjointView<Eigen::Lower>().rankUpdate(shifted);
  gram.diagonal().array() += eta * eta;
  const lapack::CholeskyFactor chol(gram);
  if (!chol.ok()) throw NumericalError("hermitized resolvent: Cholesky factorization failed");
  const ComplexVector y = chol.solve(w);
  return cplx{0.0, eta} * q.dot(y);
}

}  // namespace rmlab
