#include "rmlab/charpoly.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rmlab/rng.hpp"
#include "rmlab/stats.hpp"

namespace rmlab {

cplx PowerSeries::operator()(cplx z) const {
  if (std::abs(z) > radius) throw DomainError("power series evaluated outside its radius of validity");
  cplx acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * z + *it;
  return acc;
}

std::vector<cplx> trace_powers(const DenseComplexMatrix& m, int kmax) {
  if (m.rows() != m.cols()) throw ConfigError("trace_powers requires a square matrix");
  if (kmax < 1) throw ConfigError("trace_powers: kmax must be at least 1");
  std::vector<cplx> traces;
  traces.reserve(static_cast<std::size_t>(kmax));
  DenseComplexMatrix power = m;
  traces.push_back(power.trace());
  for (int k = 2; k <= kmax; ++k) {
    power = (power * m).eval();
    traces.push_back(power.trace());
  }
  return traces;
}

PowerSeries newton_charpoly(const std::vector<cplx>& traces, int order, double radius) {
  if (order < 0) throw ConfigError("newton_charpoly: negative order");
  if (static_cast<std::size_t>(order) > traces.size())
    throw ConfigError("newton_charpoly: order exceeds the number of power sums");
  PowerSeries s;
  s.radius = radius;
  s.coeffs.assign(static_cast<std::size_t>(order) + 1, 0.0);
  s.coeffs[0] = 1.0;
  for (int k = 1; k <= order; ++k) {
    cplx acc = 0.0;
    for (int j = 1; j <= k; ++j) acc += traces[static_cast<std::size_t>(j - 1)] * s.coeffs[static_cast<std::size_t>(k - j)];
    s.coeffs[static_cast<std::size_t>(k)] = -acc / static_cast<double>(k);
  }
  return s;
}

cplx eval_reverse_charpoly(const std::vector<cplx>& values, cplx z) {
  cplx prod = 1.0;
  for (const auto& l : values) prod *= 1.0 - z * l;
  return prod;
}

cplx eval_reverse_charpoly(const ComplexSpectrum& s, cplx z) { return eval_reverse_charpoly(s.values, z); }

PowerSeries deformation_charpoly(const Deformation& defm) {
  const auto c = reduced_matrix(defm);
  const int r = static_cast<int>(c.rows());
  return newton_charpoly(trace_powers(c, r), r, std::numeric_limits<double>::infinity());
}

PowerSeries unit_series() {
  PowerSeries s;
  s.coeffs = {1.0};
  s.radius = std::numeric_limits<double>::infinity();
  return s;
}

CorrelatedGaussians sample_correlated_gaussians(cplx second_moment, int m, std::uint64_t seed) {
  if (!(std::abs(second_moment) <= 1.0)) throw DomainError("pseudo-variance must satisfy |E A^2| <= 1");
  if (m < 0) throw ConfigError("number of Gaussians must be nonnegative");
  CorrelatedGaussians out;
  out.values.reserve(static_cast<std::size_t>(m));
  out.pseudo_variances.reserve(static_cast<std::size_t>(m));
  Rng rng(seed);
  cplx tau = 1.0;
  for (int k = 1; k <= m; ++k) {
    tau *= second_moment;
    const double rho = std::min(1.0, std::abs(tau));
    const double theta = std::arg(tau);
    const double sp = std::sqrt(0.5 * (1.0 + rho));
    const double sm = std::sqrt(0.5 * (1.0 - rho));
    const double g1 = rng.normal();
    const double g2 = rng.normal();
    out.values.push_back(std::polar(1.0, 0.5 * theta) * cplx{sp * g1, sm * g2});
    out.pseudo_variances.push_back(tau);
  }
  return out;
}

double series_tail_bound(double r, int m) {
  if (r < 0.0) throw DomainError("radius must be nonnegative");
  if (r == 0.0) return 0.0;
  if (r >= 1.0) return std::numeric_limits<double>::infinity();
  const double mp1 = static_cast<double>(m + 1);
  return std::sqrt(std::pow(r, 2.0 * mp1) / (mp1 * (1.0 - r * r)));
}

int truncation_order(double r, double tol) {
  if (!(r < 1.0)) throw DomainError("truncation_order: radius must be below 1");
  int m = 0;
  while (series_tail_bound(r, m) > tol) ++m;
  return m;
}

cplx kappa(cplx z, cplx second_moment) { return std::sqrt(1.0 - z * z * second_moment); }

std::vector<cplx> kappa_series(cplx second_moment, int m) {
  if (m < 0) throw ConfigError("kappa_series: negative order");
  std::vector<cplx> c(static_cast<std::size_t>(m) + 1, 0.0);
  // sqrt(1 - x) = sum_j binom(1/2, j) (-x)^j with x = s z^2.
  double binom = 1.0;
  cplx power = 1.0;
  for (int j = 0; 2 * j <= m; ++j) {
    if (j > 0) {
      binom *= (0.5 - static_cast<double>(j - 1)) / static_cast<double>(j);
      power *= -second_moment;
    }
    c[static_cast<std::size_t>(2 * j)] = binom * power;
  }
  return c;
}

cplx random_series(const CorrelatedGaussians& zs, cplx z) {
  cplx acc = 0.0;
  cplx zk = 1.0;
  for (std::size_t k = 1; k <= zs.values.size(); ++k) {
    zk *= z;
    acc += zk * zs.values[k - 1] / std::sqrt(static_cast<double>(k));
  }
  return acc;
}

cplx limit_function(const PowerSeries& b, cplx second_moment, const CorrelatedGaussians& zs, cplx z) {
  const int m = static_cast<int>(zs.values.size());
  if (series_tail_bound(std::abs(z), m) > kSeriesTailTolerance)
    throw DomainError("limit_function: " + std::to_string(m) + " terms are too few at |z| = " +
                      std::to_string(std::abs(z)) + "; need " + std::to_string(truncation_order(std::abs(z))));
  return b(z) * kappa(z, second_moment) * std::exp(-random_series(zs, z));
}

EquivalenceTrial equivalence_trial(const EnsembleConfig& cfg, const Deformation* defm, const std::vector<cplx>& z_grid,
                                   std::uint64_t trial_seed, bool compare_gn) {
  double rmax = 0.0;
  for (const auto& z : z_grid) rmax = std::max(rmax, std::abs(z));
  const int order = truncation_order(rmax);
  const PowerSeries b = defm ? deformation_charpoly(*defm) : unit_series();

  EquivalenceTrial out;
  EnsembleConfig draw = cfg;
  draw.seed = derive_seed(trial_seed, 0, "x");
  DenseComplexMatrix y = sample_iid_matrix(draw);
  if (defm) y += deformation_matrix(*defm);
  const auto spec = eig(y);
  if (spec.flagged) {
    out.flagged = true;
    out.flag = "eig: " + spec.diagnostic;
  }
  const auto zs = sample_correlated_gaussians(cfg.law.second_moment, order, derive_seed(trial_seed, 0, "z"));
  for (const auto& z : z_grid) {
    out.q.push_back(eval_reverse_charpoly(spec, z));
    out.limit.push_back(limit_function(b, cfg.law.second_moment, zs, z));
  }
  if (compare_gn) {
    EnsembleConfig xdraw = cfg;
    xdraw.seed = derive_seed(trial_seed, 0, "x-gn");
    const auto xs = eig(sample_iid_matrix(xdraw));
    if (xs.flagged) {
      out.flagged = true;
      out.flag = "eig: " + xs.diagnostic;
    }
    for (const auto& z : z_grid) out.gn.push_back(b(z) * eval_reverse_charpoly(xs, z));
  }
  return out;
}

namespace {

// Components whose values are constant to this absolute precision are treated
// as exactly constant (e.g. Im q_n(z) of a real matrix at real z, which carries
// rounding noise).
constexpr double kConstantTol = 1e-10;

bool numerically_constant(const std::vector<double>& x) {
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  return *hi - *lo <= kConstantTol * std::max(1.0, std::abs(*lo));
}

ComponentTest compare_component(const std::vector<double>& a, const std::vector<double>& b) {
  ComponentTest t;
  const bool ca = numerically_constant(a);
  const bool cb = numerically_constant(b);
  if (ca && cb && std::abs(a.front() - b.front()) <= kConstantTol * std::max(1.0, std::abs(a.front()))) {
    t.skipped = true;
    return t;
  }
  t.degenerate = ca || cb;
  const auto ks = ks_two_sample(a, b);
  t.statistic = ks.statistic;
  t.p_value = ks.p_value;
  return t;
}

}  // namespace

EquivalenceReport equivalence_from_samples(const std::vector<cplx>& z_grid, const std::vector<std::vector<cplx>>& q,
                                           const std::vector<std::vector<cplx>>& limit, double alpha) {
  EquivalenceReport report;
  report.alpha = alpha;
  std::vector<double> p_values;
  std::vector<ComponentTest*> tests;
  report.blocks.resize(z_grid.size());
  for (std::size_t g = 0; g < z_grid.size(); ++g) {
    auto& block = report.blocks[g];
    block.z = z_grid[g];
    block.n_trials = q.size();
    std::vector<double> qre, qim, lre, lim;
    for (const auto& row : q) {
      qre.push_back(row[g].real());
      qim.push_back(row[g].imag());
    }
    for (const auto& row : limit) {
      lre.push_back(row[g].real());
      lim.push_back(row[g].imag());
    }
    block.re = compare_component(qre, lre);
    block.im = compare_component(qim, lim);
    const auto sqr = summarize_values(qre), sqi = summarize_values(qim);
    const auto slr = summarize_values(lre), sli = summarize_values(lim);
    block.mean_q = {sqr.mean, sqi.mean};
    block.mean_limit = {slr.mean, sli.mean};
    block.se_q = std::hypot(sqr.std, sqi.std) / std::sqrt(static_cast<double>(sqr.n));
    block.se_limit = std::hypot(slr.std, sli.std) / std::sqrt(static_cast<double>(slr.n));
  }
  for (auto& block : report.blocks) {
    for (auto* t : {&block.re, &block.im}) {
      if (t->skipped) continue;
      p_values.push_back(t->p_value);
      tests.push_back(t);
    }
  }
  const auto rejected = holm_reject(p_values, alpha);
  for (std::size_t i = 0; i < tests.size(); ++i) {
    tests[i]->rejected = rejected[i];
    report.reject = report.reject || rejected[i];
  }
  return report;
}

EquivalenceReport equivalence_test(const EnsembleConfig& cfg, const Deformation* defm, const std::vector<cplx>& z_grid,
                                   int trials, double alpha, const EquivalenceOptions& options) {
  cfg.validate();
  if (trials < 100) throw ConfigError("equivalence_test needs at least 100 trials per side");
  for (const auto& z : z_grid)
    if (std::abs(z) > 0.7) throw ConfigError("equivalence_test: grid points must satisfy |z| <= 0.7");
  std::vector<std::vector<cplx>> q, lim, gn;
  std::size_t flagged = 0;
  for (int t = 0; t < trials; ++t) {
    const auto seed = derive_seed(options.master_seed, static_cast<std::uint64_t>(t), "charpoly_equivalence");
    auto tr = equivalence_trial(cfg, defm, z_grid, seed, options.compare_gn);
    if (tr.flagged) {
      ++flagged;
      continue;
    }
    q.push_back(std::move(tr.q));
    lim.push_back(std::move(tr.limit));
    gn.push_back(std::move(tr.gn));
  }
  auto report = equivalence_from_samples(z_grid, q, lim, alpha);
  report.flagged_trials = flagged;
  if (options.compare_gn) {
    auto sub = equivalence_from_samples(z_grid, q, gn, alpha);
    report.gn_blocks = std::move(sub.blocks);
    report.gn_reject = sub.reject;
  }
  return report;
}

nlohmann::json to_json(const EquivalenceReport& report) {
  nlohmann::json j;
  j["alpha"] = report.alpha;
  j["reject"] = report.reject;
  j["flagged_trials"] = report.flagged_trials;
  j["blocks"] = blocks_to_json(report.blocks);
  if (!report.gn_blocks.empty()) {
    j["gn_blocks"] = blocks_to_json(report.gn_blocks);
    j["gn_reject"] = report.gn_reject;
  }
  return j;
}

nlohmann::json blocks_to_json(const std::vector<EquivalenceBlock>& blocks) {
  auto arr = nlohmann::json::array();
  for (const auto& b : blocks) {
    nlohmann::json jb;
    jb["z"] = {b.z.real(), b.z.imag()};
    jb["ks_re"] = b.re.statistic;
    jb["p_re"] = b.re.p_value;
    jb["skipped_re"] = b.re.skipped;
    jb["rejected_re"] = b.re.rejected;
    jb["ks_im"] = b.im.statistic;
    jb["p_im"] = b.im.p_value;
    jb["skipped_im"] = b.im.skipped;
    jb["rejected_im"] = b.im.rejected;
    jb["n_trials"] = b.n_trials;
    jb["mean_q"] = {b.mean_q.real(), b.mean_q.imag()};
    jb["mean_limit"] = {b.mean_limit.real(), b.mean_limit.imag()};
    jb["se_q"] = b.se_q;
    jb["se_limit"] = b.se_limit;
    arr.push_back(jb);
  }
  return arr;
}

}  // namespace rmlab
