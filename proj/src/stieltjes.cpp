#include "rmlab/stieltjes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace rmlab {

namespace {

using lcplx = std::complex<long double>;

constexpr int kMaxFixedPointSteps = 100000;
constexpr int kMaxNewtonSteps = 60;
// Switch from the damped iteration to Newton once successive iterates agree
// to this relative precision.
constexpr long double kNewtonSwitch = 1e-7L;

long double residual(lcplx w, lcplx m, long double a) {
  return std::abs(-1.0L / m - (w + m - a / (w + m)));
}

void require_domain(double xi_mod) {
  if (!(xi_mod > 1.0) || !std::isfinite(xi_mod)) throw DomainError("|xi| must be finite and greater than 1");
}

}  // namespace

StieltjesSolution solve_m(cplx w_in, double xi_mod, double tol) {
  require_domain(xi_mod);
  if (!(w_in.imag() > 0.0)) throw DomainError("solve_m: Im w must be positive");
  const long double a = static_cast<long double>(xi_mod) * static_cast<long double>(xi_mod);
  const lcplx w(w_in.real(), w_in.imag());

  auto fail = [&](const std::string& why) {
    return NumericalError("solve_m: " + why + " at w = (" + std::to_string(w_in.real()) + ", " +
                          std::to_string(w_in.imag()) + "), |xi| = " + std::to_string(xi_mod));
  };

  lcplx m(0.0L, 1.0L);
  int steps = 0;
  for (; steps < kMaxFixedPointSteps; ++steps) {
    if (residual(w, m, a) <= tol) break;
    const lcplx g = -1.0L / (w + m - a / (w + m));
    const lcplx next = 0.5L * m + 0.5L * g;
    if (!(next.imag() > 0.0L)) throw fail("iterate left the upper half-plane");
    const long double change = std::abs(next - m);
    m = next;
    if (change <= kNewtonSwitch * std::abs(m)) break;
  }
  if (steps == kMaxFixedPointSteps) throw fail("no convergence after 1e5 fixed-point steps");

  // Newton on F(m) = 1/m + w + m - a/(w + m), which has the same zero.
  for (int k = 0; k < kMaxNewtonSteps && residual(w, m, a) > tol * 1e-2L; ++k) {
    const lcplx s = w + m;
    const lcplx f = 1.0L / m + s - a / s;
    const lcplx df = -1.0L / (m * m) + 1.0L + a / (s * s);
    const lcplx next = m - f / df;
    if (!(next.imag() > 0.0L)) break;
    const bool stalled = std::abs(next - m) <= 1e-18L * std::abs(m);
    m = next;
    ++steps;
    if (stalled) break;
  }

  StieltjesSolution sol;
  sol.w = w_in;
  sol.m = cplx(static_cast<double>(m.real()), static_cast<double>(m.imag()));
  sol.residual = static_cast<double>(residual(w, m, a));
  sol.iterations = steps;
  if (!(sol.residual <= tol)) throw fail("residual " + std::to_string(sol.residual) + " above tolerance");
  if (!(sol.m.imag() > 0.0)) throw fail("solution outside the upper half-plane");
  return sol;
}

double h_eta(double eta, double xi_mod) {
  require_domain(xi_mod);
  if (!(eta >= 0.0)) throw DomainError("h_eta: eta must be nonnegative");
  const long double a = static_cast<long double>(xi_mod) * xi_mod;
  if (eta == 0.0) return static_cast<double>(1.0L / (a - 1.0L));
  const long double e2 = static_cast<long double>(eta) * eta;
  auto cubic = [&](long double h) { return ((e2 * h + 2.0L * e2) * h + (e2 + a - 1.0L)) * h - 1.0L; };
  auto dcubic = [&](long double h) { return (3.0L * e2 * h + 4.0L * e2) * h + (e2 + a - 1.0L); };
  long double lo = 0.0L;
  long double hi = 1.0L / (a - 1.0L) + 10.0L;
  if (!(cubic(lo) < 0.0L && cubic(hi) > 0.0L)) throw NumericalError("h_eta: no sign change in the bracket");
  for (int it = 0; it < 200 && hi - lo > 1e-19L * hi; ++it) {
    const long double mid = 0.5L * (lo + hi);
    (cubic(mid) < 0.0L ? lo : hi) = mid;
  }
  long double h = 0.5L * (lo + hi);
  for (int it = 0; it < 3; ++it) h -= cubic(h) / dcubic(h);
  return static_cast<double>(h);
}

double density(double x, double xi_mod, double eta_small) {
  if (!(eta_small > 0.0 && eta_small <= 1e-2)) throw DomainError("density: eta_small must lie in (0, 1e-2]");
  const auto sol = solve_m(cplx{x, eta_small}, xi_mod);
  return std::max(0.0, sol.m.imag() / std::numbers::pi);
}

SupportEstimate support_estimate(double xi_mod, double eta_small, double threshold) {
  require_domain(xi_mod);
  // Singular values of G - xi I lie below |G| + |xi|, and |G| -> 2.
  const double x_lo = 1e-3;
  const double x_hi = xi_mod + 4.0;
  constexpr int kGrid = 2000;
  std::vector<double> xs(kGrid), dens(kGrid);
  for (int i = 0; i < kGrid; ++i) {
    xs[i] = x_lo * std::pow(x_hi / x_lo, static_cast<double>(i) / (kGrid - 1));
    dens[i] = density(xs[i], xi_mod, eta_small);
  }
  int first = -1, last = -1;
  for (int i = 0; i < kGrid; ++i) {
    if (dens[i] >= threshold) {
      if (first < 0) first = i;
      last = i;
    }
  }
  if (first <= 0 || last < 0 || last == kGrid - 1)
    throw NumericalError("support_estimate: density never crosses the threshold inside the scan window");

  auto refine = [&](double below, double above) {
    // `below` has density under the threshold, `above` over it.
    for (int it = 0; it < 40; ++it) {
      const double mid = 0.5 * (below + above);
      (density(mid, xi_mod, eta_small) >= threshold ? above : below) = mid;
    }
    return 0.5 * (below + above);
  };
  SupportEstimate s;
  s.c = refine(xs[first - 1], xs[first]);
  s.C = refine(xs[last + 1], xs[last]);
  s.eta_small = eta_small;
  s.threshold = threshold;
  if (!(s.c < s.C)) throw NumericalError("support_estimate: inner edge not below outer edge");
  return s;
}

cplx gaussian_resolvent_prediction(cplx xi, double eta, const ComplexVector& w, const ComplexVector& q) {
  if (w.size() != q.size()) throw ConfigError("gaussian_resolvent_prediction: vector dimension mismatch");
  if (!(eta > 0.0)) throw DomainError("gaussian_resolvent_prediction: eta must be positive");
  const auto sol = solve_m(cplx{0.0, eta}, std::abs(xi));
  return sol.m * q.dot(w);
}

nlohmann::json to_json(const SupportEstimate& s, double xi_mod) {
  nlohmann::json j;
  j["xi"] = xi_mod;
  j["c"] = s.c;
  j["C"] = s.C;
  j["eta_small"] = s.eta_small;
  j["threshold"] = s.threshold;
  return j;
}

}  // namespace rmlab
