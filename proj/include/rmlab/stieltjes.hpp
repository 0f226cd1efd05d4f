#pragma once

#include <vector>

#include "rmlab/types.hpp"

#include <json.hpp>

namespace rmlab {

// Limit objects of the hermitized Gaussian model
//   S(xi) = [[0, G - xi I], [(G - xi I)^*, 0]],  |xi| > 1,
// whose spectral measure mu^xi has Stieltjes transform m solving
//   -1/m = w + m - |xi|^2 / (w + m),  Im m > 0 for Im w > 0.
// Everything here depends on xi only through |xi|.

struct StieltjesSolution {
  cplx w;
  cplx m;
  double residual = 0.0;  ///< |-1/m - (w + m - |xi|^2/(w + m))|
  int iterations = 0;
};

struct SupportEstimate {
  double c = 0.0;  ///< inner edge
  double C = 0.0;  ///< outer edge
  double eta_small = 0.0;
  double threshold = 0.0;
};

inline constexpr double kStieltjesTolerance = 1e-12;
inline constexpr double kDefaultEtaSmall = 1e-4;
inline constexpr double kSupportThreshold = 1e-3;

/// Damped fixed-point iteration m <- m/2 + (1/2)(-1/(w + m - |xi|^2/(w + m)))
/// from m = i, followed by Newton polishing of the same equation once the
/// iterate is close. Arithmetic is carried out in long double; the residual
/// is certified before returning. Throws NumericalError if an iterate leaves
/// the upper half-plane or 1e5 steps pass without convergence.
StieltjesSolution solve_m(cplx w, double xi_mod, double tol = kStieltjesTolerance);

/// Unique positive root of eta^2 h^3 + 2 eta^2 h^2 + (eta^2 + |xi|^2 - 1) h - 1 = 0,
/// i.e. h(eta) = Im m(i eta) / eta. At eta = 0 returns 1/(|xi|^2 - 1).
double h_eta(double eta, double xi_mod);

/// Stieltjes inversion (1/pi) Im m(x + i eta_small), clipped at 0.
double density(double x, double xi_mod, double eta_small = kDefaultEtaSmall);

/// Innermost and outermost points on the positive axis where the density
/// crosses the reporting threshold.
SupportEstimate support_estimate(double xi_mod, double eta_small = kDefaultEtaSmall,
                                 double threshold = kSupportThreshold);

/// m(i eta) <w, q> with <w, q> = q^* w, the deterministic limit of
/// q^* (S - i eta)^{-1} w for w, q supported on the first n coordinates.
cplx gaussian_resolvent_prediction(cplx xi, double eta, const ComplexVector& w, const ComplexVector& q);

nlohmann::json to_json(const SupportEstimate& s, double xi_mod);

}  // namespace rmlab
