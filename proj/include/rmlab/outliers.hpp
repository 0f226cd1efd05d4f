#pragma once

#include <vector>

#include "rmlab/ensemble.hpp"
#include "rmlab/spectra.hpp"
#include "rmlab/types.hpp"

#include <json.hpp>

namespace rmlab {

/// Raised by eigvec_overlap when the number of eigenvalues outside the ring
/// |z| >= 1 + eps is not exactly one.
class DegenerateOutlierError : public NumericalError {
 public:
  DegenerateOutlierError(const std::string& what, std::size_t count) : NumericalError(what), count_(count) {}
  std::size_t count() const { return count_; }

 private:
  std::size_t count_;
};

struct OutlierReport {
  double eps = 0.0;
  std::vector<cplx> observed;   ///< eigenvalues of Y with |lambda| >= 1 + eps
  std::vector<cplx> predicted;  ///< eigenvalues of E with |lambda| > 1
  double hausdorff = 0.0;       ///< +inf when exactly one side is empty
  bool count_match = false;
};

struct OverlapResult {
  cplx lambda_max;
  double overlap_sq = 0.0;  ///< |<u~, u/|u|>|^2
  double predicted = 0.0;   ///< 1 - 1/|<u, v>|^2
  cplx inner_uv;            ///< <v, u> = v^* u
  double residual = 0.0;    ///< |Y u~ - lambda u~|
};

std::vector<cplx> outlier_set(const ComplexSpectrum& s, double eps);
std::vector<cplx> outlier_set(const std::vector<cplx>& values, double eps);

/// max(sup_a d(a, B), sup_b d(b, A)); 0 when both sets are empty and +inf when
/// exactly one is.
double hausdorff(const std::vector<cplx>& a, const std::vector<cplx>& b);

/// 0.25 * (min_{|lambda(E)| > 1} |lambda(E)| - 1). Throws DomainError when E
/// has no eigenvalue outside the closed unit disk.
double default_eps(const std::vector<cplx>& deformation_eigenvalues);

OutlierReport outlier_report(const ComplexSpectrum& y_spectrum, const std::vector<cplx>& deformation_eigenvalues,
                             double eps);

/// f(z) = 1 + v^* (X - zI)^{-1} u; Y = X + u v^* has eigenvalue z off sigma(X)
/// exactly when f(z) = 0. Throws NumericalError when X - zI is numerically singular.
cplx secular_value(const DenseComplexMatrix& x, cplx z, const ComplexVector& u, const ComplexVector& v);

struct SecularRoot {
  cplx z;
  double residual = 0.0;  ///< |f(z)|
  int iterations = 0;
  bool inside_unit_disk = false;  ///< converged, but not an outlier
};

struct SecularOptions {
  int max_iter = 100;
  double tol = 1e-10;
  int max_halvings = 30;
};

/// Damped Newton iteration on f with f'(z) = v^* (X - zI)^{-2} u.
SecularRoot secular_root(const DenseComplexMatrix& x, const ComplexVector& u, const ComplexVector& v, cplx z_init,
                         const SecularOptions& options = {});

/// 1 - 1/|inner_uv|^2; DomainError unless |inner_uv| > 1.
double predicted_overlap(cplx inner_uv);

/// Overlap of the right eigenvector of the unique outlier of y = X + u v^*
/// with u/|u|. The eigenvector is obtained by inverse iteration on y started
/// from u. Throws DegenerateOutlierError unless exactly one eigenvalue has
/// modulus >= 1 + eps.
OverlapResult eigvec_overlap(const DenseComplexMatrix& y, const ComplexVector& u, const ComplexVector& v, double eps);
OverlapResult eigvec_overlap(const DenseComplexMatrix& y, const ComplexSpectrum& y_spectrum, const ComplexVector& u,
                             const ComplexVector& v, double eps);

nlohmann::json to_json(const OutlierReport& report);
nlohmann::json to_json(const OverlapResult& result);

}  // namespace rmlab
