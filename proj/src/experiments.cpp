#include "experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "rmlab/charpoly.hpp"
#include "rmlab/outliers.hpp"
#include "rmlab/rng.hpp"
#include "rmlab/spectra.hpp"
#include "rmlab/stieltjes.hpp"

namespace rmlab::detail {

using nlohmann::json;

cplx json_to_complex(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  throw ConfigError("expected a number or a [re, im] pair, got " + j.dump());
}

json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

namespace {

void set_default(json& params, const char* key, json value) {
  if (!params.contains(key)) params[key] = std::move(value);
}

void require(const json& params, const char* key) {
  if (!params.contains(key)) throw ConfigError(std::string("missing parameter '") + key + "'");
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

double param(const ExperimentSpec& spec, const char* key) { return spec.params.at(key).get<double>(); }

EnsembleConfig draw_config(const ExperimentSpec& spec, std::uint64_t seed, std::string_view role) {
  EnsembleConfig cfg = spec.ensemble;
  cfg.seed = derive_seed(seed, 0, role);
  return cfg;
}

ComplexVector probe_vector(const ExperimentSpec& spec) {
  const auto n = spec.ensemble.n;
  const auto kind = spec.params.at("vector").get<std::string>();
  if (kind == "basis") return basis_vector(n, 0);
  if (kind == "constant") return constant_vector(n);
  if (kind == "random") return random_unit_vector(n, spec.params.at("vector_seed").get<std::uint64_t>());
  throw ConfigError("unknown probe vector '" + kind + "' (expected basis, constant or random)");
}

double outlier_eps(const ExperimentSpec& spec, const std::vector<cplx>& e_eigs) {
  if (spec.params.contains("eps")) return param(spec, "eps");
  return default_eps(e_eigs);
}

cplx largest_modulus(const std::vector<cplx>& values) {
  return *std::max_element(values.begin(), values.end(),
                           [](cplx a, cplx b) { return std::abs(a) < std::abs(b); });
}

json complex_array(const std::vector<cplx>& values) {
  auto arr = json::array();
  for (const auto& v : values) arr.push_back(complex_to_json(v));
  return arr;
}

std::vector<cplx> complex_vector(const json& arr) {
  std::vector<cplx> out;
  for (const auto& v : arr) out.push_back(json_to_complex(v));
  return out;
}

void note_eig(const ComplexSpectrum& s, TrialRecord& record) {
  if (s.flagged) record.flags.push_back("eig-flagged: " + s.diagnostic);
}

}  // namespace

bool uses_ensemble(ExperimentKind kind) { return kind != ExperimentKind::StieltjesCurve; }

void complete_params(ExperimentKind kind, json& params, bool has_deformation) {
  if (!params.is_object()) throw ConfigError("'params' must be an object");
  auto need_deformation = [&] {
    if (!has_deformation) throw ConfigError(to_string(kind) + " experiments require a deformation");
  };
  switch (kind) {
    case ExperimentKind::SpectralRadius:
      set_default(params, "mean_range", json::array({0.9, 1.1}));
      set_default(params, "tail_threshold", 1.25);
      set_default(params, "tail_prob", 0.05);
      break;
    case ExperimentKind::CircularLaw:
      set_default(params, "radii", json::array({0.5}));
      set_default(params, "tolerance", 0.04);
      break;
    case ExperimentKind::OutlierHausdorff:
      need_deformation();
      set_default(params, "min_count_match_prob", 0.9);
      set_default(params, "max_mean_hausdorff", 0.2);
      break;
    case ExperimentKind::LambdaMax:
      need_deformation();
      set_default(params, "tolerance", 0.15);
      set_default(params, "min_unique_prob", 0.95);
      set_default(params, "min_close_prob", 0.95);
      set_default(params, "secular", false);
      break;
    case ExperimentKind::Overlap:
      need_deformation();
      set_default(params, "tolerance", 0.05);
      break;
    case ExperimentKind::CharpolyEquivalence:
      require(params, "z_grid");
      set_default(params, "alpha", 0.01);
      set_default(params, "compare_gn", false);
      for (const auto& z : params["z_grid"])
        if (std::abs(json_to_complex(z)) > 0.7) throw ConfigError("z_grid points must satisfy |z| <= 0.7");
      break;
    case ExperimentKind::UniversalitySmin:
      set_default(params, "xi", 2.0);
      set_default(params, "tolerance", 0.1);
      set_default(params, "min_close_prob", 0.9);
      set_default(params, "min_support_prob", 0.95);
      break;
    case ExperimentKind::UniversalityResolvent:
      set_default(params, "xi", 2.0);
      set_default(params, "eta", 0.5);
      set_default(params, "vector", "random");
      set_default(params, "vector_seed", 20250101);
      set_default(params, "tolerance", 0.05);
      set_default(params, "min_close_prob", 0.9);
      set_default(params, "compare_gaussian", true);
      break;
    case ExperimentKind::StieltjesCurve:
      set_default(params, "xi2", json::array({1.5, 2.0, 5.0}));
      set_default(params, "etas", json::array({1.0, 0.5, 0.1, 0.05, 0.01, 0.005, 0.001}));
      set_default(params, "check_eta", 1e-3);
      set_default(params, "tolerance", 1e-2);
      set_default(params, "max_residual", kStieltjesTolerance);
      set_default(params, "max_cross_diff", 1e-8);
      break;
  }
  if (kind == ExperimentKind::UniversalitySmin || kind == ExperimentKind::UniversalityResolvent) {
    if (!(std::abs(json_to_complex(params["xi"])) > 1.0)) throw ConfigError("xi must satisfy |xi| > 1");
  }
}

void execute_trial(const ExperimentSpec& spec, const Deformation* defm, TrialRecord& record) {
  const std::uint64_t seed = record.derived_seed;
  auto& obs = record.observables;
  switch (spec.kind) {
    case ExperimentKind::SpectralRadius: {
      const auto s = eig(sample_iid_matrix(draw_config(spec, seed, "x")));
      note_eig(s, record);
      obs["rho"] = spectral_radius(s);
      break;
    }
    case ExperimentKind::CircularLaw: {
      const auto s = eig(sample_iid_matrix(draw_config(spec, seed, "x")));
      note_eig(s, record);
      const auto radii = spec.params.at("radii").get<std::vector<double>>();
      const auto fractions = esd_radial_fractions(s, radii);
      for (std::size_t i = 0; i < radii.size(); ++i) obs["fraction_le_" + fmt(radii[i])] = fractions[i];
      obs["rho"] = spectral_radius(s);
      break;
    }
    case ExperimentKind::OutlierHausdorff: {
      const auto e_eigs = deformation_eigenvalues(*defm);
      const double eps = outlier_eps(spec, e_eigs);
      const auto s = eig(sample_iid_matrix(draw_config(spec, seed, "x")) + deformation_matrix(*defm));
      note_eig(s, record);
      const auto rep = outlier_report(s, e_eigs, eps);
      obs["eps"] = eps;
      obs["n_outliers"] = rep.observed.size();
      obs["count_match"] = rep.count_match ? 1.0 : 0.0;
      obs["outliers"] = complex_array(rep.observed);
      if (std::isfinite(rep.hausdorff))
        obs["hausdorff"] = rep.hausdorff;
      else
        record.flags.push_back("empty-outlier-set");
      break;
    }
    case ExperimentKind::LambdaMax: {
      const auto e_eigs = deformation_eigenvalues(*defm);
      const double eps = outlier_eps(spec, e_eigs);
      const cplx target = largest_modulus(e_eigs);
      const auto x = sample_iid_matrix(draw_config(spec, seed, "x"));
      const auto s = eig(x + deformation_matrix(*defm));
      note_eig(s, record);
      const auto out = outlier_set(s, eps);
      obs["n_outliers"] = out.size();
      if (out.size() != 1) {
        record.flags.push_back("no-unique-outlier");
        break;
      }
      obs["lambda_re"] = out.front().real();
      obs["lambda_im"] = out.front().imag();
      obs["lambda_err"] = std::abs(out.front() - target);
      if (spec.params.at("secular").get<bool>()) {
        if (defm->rank() != 1) throw ConfigError("secular cross-check needs a rank-one deformation");
        const auto root = secular_root(x, defm->pairs[0].first, defm->pairs[0].second, out.front());
        obs["secular_err"] = std::abs(root.z - out.front());
        obs["secular_iterations"] = root.iterations;
      }
      break;
    }
    case ExperimentKind::Overlap: {
      if (defm->rank() != 1) throw ConfigError("overlap experiments need a rank-one deformation");
      const auto e_eigs = deformation_eigenvalues(*defm);
      const double eps = outlier_eps(spec, e_eigs);
      const DenseComplexMatrix y = sample_iid_matrix(draw_config(spec, seed, "x")) + deformation_matrix(*defm);
      const auto s = eig(y);
      note_eig(s, record);
      try {
        const auto r = eigvec_overlap(y, s, defm->pairs[0].first, defm->pairs[0].second, eps);
        obs["overlap_sq"] = r.overlap_sq;
        obs["predicted"] = r.predicted;
        obs["lambda_re"] = r.lambda_max.real();
        obs["lambda_im"] = r.lambda_max.imag();
        obs["eigvec_residual"] = r.residual;
        obs["n_outliers"] = 1;
      } catch (const DegenerateOutlierError& e) {
        obs["n_outliers"] = e.count();
        record.flags.push_back("no-unique-outlier");
      }
      break;
    }
    case ExperimentKind::CharpolyEquivalence: {
      const auto grid = complex_vector(spec.params.at("z_grid"));
      const bool gn = spec.params.at("compare_gn").get<bool>();
      const auto tr = equivalence_trial(spec.ensemble, defm, grid, seed, gn);
      if (tr.flagged) record.flags.push_back(tr.flag);
      obs["q"] = complex_array(tr.q);
      obs["limit"] = complex_array(tr.limit);
      if (gn) obs["gn"] = complex_array(tr.gn);
      break;
    }
    case ExperimentKind::UniversalitySmin: {
      const cplx xi = json_to_complex(spec.params.at("xi"));
      auto x = sample_iid_matrix(draw_config(spec, seed, "x"));
      auto g = sample_ginibre_real(spec.ensemble.n, derive_seed(seed, 0, "g"));
      x.diagonal().array() -= xi;
      g.diagonal().array() -= xi;
      const auto sx = singular_values(x);
      const auto sg = singular_values(g);
      if (sx.flagged) record.flags.push_back("svd-flagged: " + sx.diagnostic);
      if (sg.flagged) record.flags.push_back("svd-flagged: " + sg.diagnostic);
      obs["smin_x"] = sx.smallest();
      obs["smin_g"] = sg.smallest();
      obs["smin_diff"] = std::abs(sx.smallest() - sg.smallest());
      break;
    }
    case ExperimentKind::UniversalityResolvent: {
      const cplx xi = json_to_complex(spec.params.at("xi"));
      const double eta = param(spec, "eta");
      const auto w = probe_vector(spec);
      const auto x = sample_iid_matrix(draw_config(spec, seed, "x"));
      const cplx value = hermitized_resolvent_bilinear(x, xi, eta, w, w);
      const cplx predicted = gaussian_resolvent_prediction(xi, eta, w, w);
      obs["resolvent_re"] = value.real();
      obs["resolvent_im"] = value.imag();
      obs["predicted_im"] = predicted.imag();
      obs["err"] = std::abs(value - predicted);
      if (spec.params.at("compare_gaussian").get<bool>()) {
        const auto g = sample_ginibre_real(spec.ensemble.n, derive_seed(seed, 0, "g"));
        const cplx gvalue = hermitized_resolvent_bilinear(g, xi, eta, w, w);
        obs["err_gaussian"] = std::abs(gvalue - predicted);
        obs["diff_x_g"] = std::abs(value - gvalue);
      }
      break;
    }
    case ExperimentKind::StieltjesCurve: {
      const auto xi2s = spec.params.at("xi2").get<std::vector<double>>();
      auto etas = spec.params.at("etas").get<std::vector<double>>();
      const double check_eta = param(spec, "check_eta");
      if (std::find(etas.begin(), etas.end(), check_eta) == etas.end()) etas.push_back(check_eta);
      json curves = json::array();
      double max_res = 0.0, max_cross = 0.0, max_limit_err = 0.0;
      for (double xi2 : xi2s) {
        const double xi_mod = std::sqrt(xi2);
        json rows = json::array();
        for (double eta : etas) {
          const auto sol = solve_m(cplx{0.0, eta}, xi_mod);
          const double h = h_eta(eta, xi_mod);
          const double ratio = sol.m.imag() / eta;
          max_res = std::max(max_res, sol.residual);
          max_cross = std::max(max_cross, std::abs(ratio - h));
          if (eta == check_eta) max_limit_err = std::max(max_limit_err, std::abs(ratio - 1.0 / (xi2 - 1.0)));
          rows.push_back({eta, h, ratio, sol.residual});
        }
        curves.push_back({{"xi2", xi2}, {"limit", 1.0 / (xi2 - 1.0)}, {"rows", rows}});
      }
      obs["curves"] = curves;
      obs["max_residual"] = max_res;
      obs["max_cross_diff"] = max_cross;
      obs["max_limit_err"] = max_limit_err;
      break;
    }
  }
}

namespace {

void add(ExperimentReport& report, std::string name, double value, std::string rule, bool pass) {
  report.criteria.push_back({std::move(name), value, std::move(rule), pass});
}

std::vector<double> scalar_values(const std::vector<TrialRecord>& records, const std::string& key) {
  std::vector<double> out;
  for (const auto& r : records)
    if (!r.flagged() && r.observables.contains(key) && r.observables[key].is_number())
      out.push_back(r.observables[key].get<double>());
  return out;
}

double fraction(const std::vector<double>& values, auto pred) {
  if (values.empty()) return 0.0;
  const auto hits = std::count_if(values.begin(), values.end(), pred);
  return static_cast<double>(hits) / static_cast<double>(values.size());
}

double mean_of(const std::vector<double>& values) {
  return values.empty() ? std::numeric_limits<double>::quiet_NaN() : summarize_values(values).mean;
}

std::string ge(double x) { return ">= " + fmt(x); }
std::string le(double x) { return "<= " + fmt(x); }

}  // namespace

void evaluate(const ExperimentSpec& spec, const std::vector<TrialRecord>& records, ExperimentReport& report) {
  const double trials = static_cast<double>(records.size());
  std::size_t unflagged = 0;
  for (const auto& r : records) unflagged += r.flagged() ? 0 : 1;
  const auto& p = spec.params;

  switch (spec.kind) {
    case ExperimentKind::SpectralRadius: {
      const auto rho = scalar_values(records, "rho");
      const auto range = p.at("mean_range").get<std::vector<double>>();
      const double m = mean_of(rho);
      add(report, "mean_rho", m, "in [" + fmt(range.at(0)) + ", " + fmt(range.at(1)) + "]",
          m >= range.at(0) && m <= range.at(1));
      const double thr = p.at("tail_threshold").get<double>();
      const double tail = fraction(rho, [&](double x) { return x > thr; });
      add(report, "p_rho_above_" + fmt(thr), tail, le(p.at("tail_prob").get<double>()),
          tail <= p.at("tail_prob").get<double>());
      break;
    }
    case ExperimentKind::CircularLaw: {
      const double tol = p.at("tolerance").get<double>();
      for (double r : p.at("radii").get<std::vector<double>>()) {
        const double m = mean_of(scalar_values(records, "fraction_le_" + fmt(r)));
        const double predicted = std::min(r * r, 1.0);
        report.statistics["predicted_fraction_le_" + fmt(r)] = predicted;
        add(report, "mean_fraction_le_" + fmt(r), m, "within " + fmt(tol) + " of " + fmt(predicted),
            std::abs(m - predicted) <= tol);
      }
      break;
    }
    case ExperimentKind::OutlierHausdorff: {
      const auto match = scalar_values(records, "count_match");
      const double p_match = std::count(match.begin(), match.end(), 1.0) / trials;
      add(report, "p_count_match", p_match, ge(p.at("min_count_match_prob").get<double>()),
          p_match >= p.at("min_count_match_prob").get<double>());
      const double mh = mean_of(scalar_values(records, "hausdorff"));
      add(report, "mean_hausdorff", mh, le(p.at("max_mean_hausdorff").get<double>()),
          mh <= p.at("max_mean_hausdorff").get<double>());
      break;
    }
    case ExperimentKind::LambdaMax: {
      const double p_unique = static_cast<double>(unflagged) / trials;
      add(report, "p_unique_outlier", p_unique, ge(p.at("min_unique_prob").get<double>()),
          p_unique >= p.at("min_unique_prob").get<double>());
      const double tol = p.at("tolerance").get<double>();
      const auto err = scalar_values(records, "lambda_err");
      const double p_close = fraction(err, [&](double e) { return e <= tol; });
      add(report, "p_lambda_within_" + fmt(tol), p_close, ge(p.at("min_close_prob").get<double>()),
          !err.empty() && p_close >= p.at("min_close_prob").get<double>());
      break;
    }
    case ExperimentKind::Overlap: {
      const auto ov = scalar_values(records, "overlap_sq");
      const auto pred = scalar_values(records, "predicted");
      const double m = mean_of(ov);
      const double predicted = pred.empty() ? std::numeric_limits<double>::quiet_NaN() : pred.front();
      const double tol = p.at("tolerance").get<double>();
      report.statistics["predicted"] = predicted;
      report.statistics["p_unique_outlier"] = static_cast<double>(unflagged) / trials;
      add(report, "mean_overlap_sq", m, "within " + fmt(tol) + " of " + fmt(predicted),
          std::abs(m - predicted) <= tol);
      break;
    }
    case ExperimentKind::CharpolyEquivalence: {
      const auto grid = complex_vector(p.at("z_grid"));
      std::vector<std::vector<cplx>> q, lim, gn;
      for (const auto& r : records) {
        if (r.flagged()) continue;
        q.push_back(complex_vector(r.observables.at("q")));
        lim.push_back(complex_vector(r.observables.at("limit")));
        if (r.observables.contains("gn")) gn.push_back(complex_vector(r.observables.at("gn")));
      }
      const double alpha = p.at("alpha").get<double>();
      const auto eq = equivalence_from_samples(grid, q, lim, alpha);
      report.statistics["equivalence"] = to_json(eq);
      std::size_t rejections = 0, tests = 0;
      double min_p = 1.0;
      for (const auto& b : eq.blocks)
        for (const auto* t : {&b.re, &b.im}) {
          if (t->skipped) continue;
          ++tests;
          rejections += t->rejected ? 1 : 0;
          min_p = std::min(min_p, t->p_value);
        }
      report.statistics["ks_tests"] = tests;
      report.statistics["min_p_value"] = min_p;
      add(report, "holm_rejections", static_cast<double>(rejections), "== 0 at alpha " + fmt(alpha), rejections == 0);
      if (!gn.empty() && gn.size() == q.size()) {
        const auto sub = equivalence_from_samples(grid, q, gn, alpha);
        report.statistics["gn_comparison"] = to_json(sub);
      }
      break;
    }
    case ExperimentKind::UniversalitySmin: {
      const double tol = p.at("tolerance").get<double>();
      const auto diff = scalar_values(records, "smin_diff");
      const double p_close = fraction(diff, [&](double d) { return d <= tol; });
      add(report, "p_smin_diff_within_" + fmt(tol), p_close, ge(p.at("min_close_prob").get<double>()),
          !diff.empty() && p_close >= p.at("min_close_prob").get<double>());
      const double xi_mod = std::abs(json_to_complex(p.at("xi")));
      const auto support = support_estimate(xi_mod);
      report.statistics["support"] = to_json(support, xi_mod);
      const auto sx = scalar_values(records, "smin_x");
      const double p_above = fraction(sx, [&](double s) { return s >= 0.5 * support.c; });
      add(report, "p_smin_above_half_c", p_above, ge(p.at("min_support_prob").get<double>()),
          !sx.empty() && p_above >= p.at("min_support_prob").get<double>());
      break;
    }
    case ExperimentKind::UniversalityResolvent: {
      const double tol = p.at("tolerance").get<double>();
      const auto err = scalar_values(records, "err");
      const double p_close = fraction(err, [&](double e) { return e <= tol; });
      const cplx xi = json_to_complex(p.at("xi"));
      report.statistics["m_at_i_eta"] = complex_to_json(solve_m(cplx{0.0, p.at("eta").get<double>()}, std::abs(xi)).m);
      add(report, "p_err_within_" + fmt(tol), p_close, ge(p.at("min_close_prob").get<double>()),
          !err.empty() && p_close >= p.at("min_close_prob").get<double>());
      break;
    }
    case ExperimentKind::StieltjesCurve: {
      const auto lim = scalar_values(records, "max_limit_err");
      const auto res = scalar_values(records, "max_residual");
      const auto cross = scalar_values(records, "max_cross_diff");
      auto worst = [](const std::vector<double>& v) {
        return v.empty() ? std::numeric_limits<double>::infinity() : *std::max_element(v.begin(), v.end());
      };
      add(report, "max_limit_err", worst(lim), le(p.at("tolerance").get<double>()),
          worst(lim) <= p.at("tolerance").get<double>());
      add(report, "max_residual", worst(res), le(p.at("max_residual").get<double>()),
          worst(res) <= p.at("max_residual").get<double>());
      add(report, "max_cross_diff", worst(cross), le(p.at("max_cross_diff").get<double>()),
          worst(cross) <= p.at("max_cross_diff").get<double>());
      break;
    }
  }
}

}  // namespace rmlab::detail
