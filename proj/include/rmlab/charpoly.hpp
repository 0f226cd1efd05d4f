#pragma once

#include <cstdint>
#include <vector>

#include "rmlab/ensemble.hpp"
#include "rmlab/spectra.hpp"
#include "rmlab/types.hpp"

#include <json.hpp>

namespace rmlab {

/// Truncated power series c_0 + c_1 z + ... + c_M z^M, evaluated on |z| <= radius.
struct PowerSeries {
  std::vector<cplx> coeffs;
  double radius = 1.0;

  std::size_t order() const { return coeffs.empty() ? 0 : coeffs.size() - 1; }
  /// Horner evaluation; DomainError outside the radius of validity.
  cplx operator()(cplx z) const;
};

/// Independent complex Gaussians Z_1..Z_M with E|Z_k|^2 = 1 and E Z_k^2 = s^k.
struct CorrelatedGaussians {
  std::vector<cplx> values;
  std::vector<cplx> pseudo_variances;
};

/// [tr M, tr M^2, ..., tr M^kmax] by repeated multiplication.
std::vector<cplx> trace_powers(const DenseComplexMatrix& m, int kmax);

/// First order+1 coefficients of det(I - zM) from the power sums p_k = tr M^k
/// through Newton's identities: c_0 = 1, c_k = -(1/k) sum_{j=1..k} p_j c_{k-j}.
PowerSeries newton_charpoly(const std::vector<cplx>& traces, int order, double radius = 1.0);

/// prod_i (1 - z lambda_i).
cplx eval_reverse_charpoly(const ComplexSpectrum& s, cplx z);
cplx eval_reverse_charpoly(const std::vector<cplx>& values, cplx z);

/// b(z) = det(I_r - z C) with C the reduced r x r deformation matrix, as a
/// degree-r polynomial.
PowerSeries deformation_charpoly(const Deformation& defm);

/// Identity polynomial b = 1 (no deformation).
PowerSeries unit_series();

/// Z_k = e^{i theta/2} (sigma_+ g_1 + i sigma_- g_2) with s^k = rho e^{i theta},
/// sigma_pm = sqrt((1 pm rho)/2). Two normals are drawn per k in every case.
CorrelatedGaussians sample_correlated_gaussians(cplx second_moment, int m, std::uint64_t seed);

/// Tolerance on the root-mean-square tail of F used by the truncation rule.
inline constexpr double kSeriesTailTolerance = 1e-6;

/// sqrt(E |sum_{k>M} z^k Z_k / sqrt(k)|^2) bound at |z| = r:
/// r^{2(M+1)} / ((M+1)(1 - r^2)) under the square root.
double series_tail_bound(double r, int m);

/// Smallest M whose tail bound at radius r is at most tol.
int truncation_order(double r, double tol = kSeriesTailTolerance);

/// kappa(z) = sqrt(1 - z^2 s), principal branch.
cplx kappa(cplx z, cplx second_moment);

/// Taylor coefficients of kappa up to order m.
std::vector<cplx> kappa_series(cplx second_moment, int m);

/// F(z) = sum_{k=1}^{M} z^k Z_k / sqrt(k).
cplx random_series(const CorrelatedGaussians& zs, cplx z);

/// b(z) kappa(z) exp(-F(z)). Throws DomainError when the truncation tail bound
/// at |z| exceeds kSeriesTailTolerance for the given number of Z_k.
cplx limit_function(const PowerSeries& b, cplx second_moment, const CorrelatedGaussians& zs, cplx z);

// Two-sample comparison between q_n(z) = det(I - zY) and the limit
// b kappa exp(-F) on a grid of z values.

struct EquivalenceOptions {
  std::uint64_t master_seed = 0;
  bool compare_gn = false;  ///< also sample G_n = b_n det(I - zX)
};

/// Samples of one trial: q_n(z) and the limit function at each grid point
/// (and G_n(z) when requested).
struct EquivalenceTrial {
  std::vector<cplx> q;
  std::vector<cplx> limit;
  std::vector<cplx> gn;
  bool flagged = false;
  std::string flag;
};

/// Role streams are derived from `trial_seed` ("x", "z", "x-gn").
EquivalenceTrial equivalence_trial(const EnsembleConfig& cfg, const Deformation* defm, const std::vector<cplx>& z_grid,
                                   std::uint64_t trial_seed, bool compare_gn = false);

struct ComponentTest {
  double statistic = 0.0;
  double p_value = 1.0;
  bool skipped = false;  ///< both samples constant and equal (e.g. Im part at real z)
  bool degenerate = false;  ///< one side constant, the other not
  bool rejected = false;    ///< after Holm correction
};

struct EquivalenceBlock {
  cplx z;
  ComponentTest re;
  ComponentTest im;
  std::size_t n_trials = 0;
  // Sample means of both sides, for the mean-comparison check.
  cplx mean_q;
  cplx mean_limit;
  double se_q = 0.0;
  double se_limit = 0.0;
};

struct EquivalenceReport {
  std::vector<EquivalenceBlock> blocks;
  double alpha = 0.01;
  bool reject = false;  ///< Holm-corrected verdict over every non-skipped test
  std::size_t flagged_trials = 0;
  // q_n against G_n = b_n det(I - zX), filled when compare_gn is set.
  std::vector<EquivalenceBlock> gn_blocks;
  bool gn_reject = false;
};

/// Runs the KS comparison on already collected samples (indexed [trial][grid]).
EquivalenceReport equivalence_from_samples(const std::vector<cplx>& z_grid, const std::vector<std::vector<cplx>>& q,
                                           const std::vector<std::vector<cplx>>& limit, double alpha);

/// Sequential driver. Trial t uses the seed derive_seed(master, t,
/// "charpoly_equivalence"), the same as the harness experiment of that kind.
EquivalenceReport equivalence_test(const EnsembleConfig& cfg, const Deformation* defm, const std::vector<cplx>& z_grid,
                                   int trials, double alpha, const EquivalenceOptions& options = {});

nlohmann::json to_json(const EquivalenceReport& report);
nlohmann::json blocks_to_json(const std::vector<EquivalenceBlock>& blocks);

}  // namespace rmlab
