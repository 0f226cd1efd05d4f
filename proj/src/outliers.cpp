#include "rmlab/outliers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lapack.hpp"

namespace rmlab {

namespace {

// Below this reciprocal condition number X - zI is treated as singular.
constexpr double kSingularRcond = 1e-13;

lapack::LuFactor shifted_lu(const DenseComplexMatrix& x, cplx z) {
  DenseComplexMatrix shifted = x;
  shifted.diagonal().array() -= z;
  return lapack::LuFactor(std::move(shifted));
}

void require_regular(const lapack::LuFactor& lu, cplx z) {
  if (lu.singular() || lu.rcond() < kSingularRcond)
    throw NumericalError("X - zI is numerically singular at z = (" + std::to_string(z.real()) + ", " +
                         std::to_string(z.imag()) + "); z is (close to) an eigenvalue of X");
}

struct SecularEval {
  cplx f;
  cplx df;
};

SecularEval evaluate(const DenseComplexMatrix& x, cplx z, const ComplexVector& u, const ComplexVector& v) {
  const auto lu = shifted_lu(x, z);
  require_regular(lu, z);
  const ComplexVector r1 = lu.solve(u);
  const ComplexVector r2 = lu.solve(r1);
  return {1.0 + v.dot(r1), v.dot(r2)};
}

// Lower bound on the operator norm: the largest column norm.
double norm_lower_bound(const DenseComplexMatrix& m) { return m.colwise().norm().maxCoeff(); }

}  // namespace

std::vector<cplx> outlier_set(const std::vector<cplx>& values, double eps) {
  if (!(eps > 0.0)) throw ConfigError("outlier ring width eps must be positive");
  std::vector<cplx> out;
  for (const auto& l : values)
    if (std::abs(l) >= 1.0 + eps) out.push_back(l);
  return out;
}

std::vector<cplx> outlier_set(const ComplexSpectrum& s, double eps) { return outlier_set(s.values, eps); }

double hausdorff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  if (a.empty() && b.empty()) return 0.0;
  if (a.empty() || b.empty()) return std::numeric_limits<double>::infinity();
  auto directed = [](const std::vector<cplx>& from, const std::vector<cplx>& to) {
    double sup = 0.0;
    for (const auto& p : from) {
      double inf = std::numeric_limits<double>::infinity();
      for (const auto& q : to) inf = std::min(inf, std::abs(p - q));
      sup = std::max(sup, inf);
    }
    return sup;
  };
  return std::max(directed(a, b), directed(b, a));
}

double default_eps(const std::vector<cplx>& deformation_eigenvalues) {
  double min_mod = std::numeric_limits<double>::infinity();
  for (const auto& l : deformation_eigenvalues)
    if (std::abs(l) > 1.0) min_mod = std::min(min_mod, std::abs(l));
  if (!std::isfinite(min_mod)) throw DomainError("deformation has no eigenvalue of modulus > 1; pass eps explicitly");
  return 0.25 * (min_mod - 1.0);
}

OutlierReport outlier_report(const ComplexSpectrum& y_spectrum, const std::vector<cplx>& deformation_eigenvalues,
                             double eps) {
  OutlierReport r;
  r.eps = eps;
  r.observed = outlier_set(y_spectrum, eps);
  for (const auto& l : deformation_eigenvalues)
    if (std::abs(l) > 1.0) r.predicted.push_back(l);
  r.hausdorff = hausdorff(r.observed, r.predicted);
  r.count_match = r.observed.size() == r.predicted.size();
  return r;
}

cplx secular_value(const DenseComplexMatrix& x, cplx z, const ComplexVector& u, const ComplexVector& v) {
  if (x.rows() != x.cols()) throw ConfigError("secular equation requires a square matrix");
  if (u.size() != x.rows() || v.size() != x.rows()) throw ConfigError("secular equation: vector dimension mismatch");
  const auto lu = shifted_lu(x, z);
  require_regular(lu, z);
  return 1.0 + v.dot(lu.solve(u));
}

SecularRoot secular_root(const DenseComplexMatrix& x, const ComplexVector& u, const ComplexVector& v, cplx z_init,
                         const SecularOptions& options) {
  if (x.rows() != x.cols()) throw ConfigError("secular equation requires a square matrix");
  if (u.size() != x.rows() || v.size() != x.rows()) throw ConfigError("secular equation: vector dimension mismatch");
  if (!(std::abs(z_init) > 1.0)) throw DomainError("secular_root: starting point must lie outside the unit disk");

  cplx z = z_init;
  auto cur = evaluate(x, z, u, v);
  for (int it = 0; it <= options.max_iter; ++it) {
    if (std::abs(cur.f) <= options.tol) {
      SecularRoot root;
      root.z = z;
      root.residual = std::abs(cur.f);
      root.iterations = it;
      root.inside_unit_disk = std::abs(z) <= 1.0;
      return root;
    }
    if (cur.df == 0.0) throw NumericalError("secular_root: zero derivative");
    const cplx step = cur.f / cur.df;
    double t = 1.0;
    bool accepted = false;
    for (int h = 0; h <= options.max_halvings; ++h, t *= 0.5) {
      const cplx trial = z - t * step;
      try {
        auto next = evaluate(x, trial, u, v);
        if (std::abs(next.f) <= std::abs(cur.f) || h == options.max_halvings) {
          z = trial;
          cur = next;
          accepted = true;
          break;
        }
      } catch (const NumericalError&) {
        // Landed on a pole of f; shorten the step.
      }
    }
    if (!accepted) throw NumericalError("secular_root: damped Newton step failed");
  }
  throw NumericalError("secular_root: no convergence after " + std::to_string(options.max_iter) + " iterations");
}

double predicted_overlap(cplx inner_uv) {
  const double a = std::abs(inner_uv);
  if (!(a > 1.0)) throw DomainError("predicted overlap requires |<u, v>| > 1");
  return 1.0 - 1.0 / (a * a);
}

OverlapResult eigvec_overlap(const DenseComplexMatrix& y, const ComplexVector& u, const ComplexVector& v, double eps) {
  return eigvec_overlap(y, eig(y), u, v, eps);
}

OverlapResult eigvec_overlap(const DenseComplexMatrix& y, const ComplexSpectrum& y_spectrum, const ComplexVector& u,
                             const ComplexVector& v, double eps) {
  if (y.rows() != y.cols()) throw ConfigError("eigvec_overlap requires a square matrix");
  if (u.size() != y.rows() || v.size() != y.rows()) throw ConfigError("eigvec_overlap: vector dimension mismatch");
  const auto outliers = outlier_set(y_spectrum, eps);
  if (outliers.size() != 1)
    throw DegenerateOutlierError("expected exactly one outlier, found " + std::to_string(outliers.size()),
                                 outliers.size());

  OverlapResult r;
  r.lambda_max = outliers.front();
  r.inner_uv = v.dot(u);
  r.predicted = std::abs(r.inner_uv) > 1.0 ? predicted_overlap(r.inner_uv) : std::numeric_limits<double>::quiet_NaN();

  // Inverse iteration at the computed eigenvalue. An exactly zero pivot gets a
  // relative nudge of the shift.
  cplx shift = r.lambda_max;
  auto lu = shifted_lu(y, shift);
  if (lu.singular()) {
    shift += 1e-14 * std::max(1.0, std::abs(shift));
    lu = shifted_lu(y, shift);
    if (lu.singular()) throw NumericalError("eigvec_overlap: inverse iteration matrix is singular");
  }
  const double y_norm = norm_lower_bound(y);
  ComplexVector x = u / u.norm();
  for (int it = 0; it < 6; ++it) {
    x = lu.solve(x);
    x /= x.norm();
    r.residual = (y * x - r.lambda_max * x).norm();
    if (it >= 1 && r.residual <= 1e-8 * y_norm) break;
  }
  if (!(r.residual <= 1e-8 * y_norm))
    throw NumericalError("eigvec_overlap: eigenvector residual " + std::to_string(r.residual) + " too large");
  const double unorm = u.norm();
  r.overlap_sq = std::norm(x.dot(u)) / (unorm * unorm);
  return r;
}

namespace {

nlohmann::json complex_list(const std::vector<cplx>& values) {
  auto arr = nlohmann::json::array();
  for (const auto& c : values) arr.push_back({c.real(), c.imag()});
  return arr;
}

}  // namespace

nlohmann::json to_json(const OutlierReport& report) {
  nlohmann::json j;
  j["eps"] = report.eps;
  j["observed"] = complex_list(report.observed);
  j["predicted"] = complex_list(report.predicted);
  if (std::isfinite(report.hausdorff))
    j["hausdorff"] = report.hausdorff;
  else
    j["hausdorff"] = "inf";
  j["count_match"] = report.count_match;
  return j;
}

nlohmann::json to_json(const OverlapResult& result) {
  nlohmann::json j;
  j["lambda_max"] = {result.lambda_max.real(), result.lambda_max.imag()};
  j["overlap_sq"] = result.overlap_sq;
  j["predicted"] = result.predicted;
  j["inner_uv"] = {result.inner_uv.real(), result.inner_uv.imag()};
  j["residual"] = result.residual;
  return j;
}

}  // namespace rmlab
