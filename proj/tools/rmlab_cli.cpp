// Command-line entry point: generators, one-shot computations and experiments.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "rmlab/charpoly.hpp"
#include "rmlab/ensemble.hpp"
#include "rmlab/harness.hpp"
#include "rmlab/matrix_io.hpp"
#include "rmlab/outliers.hpp"
#include "rmlab/spectra.hpp"
#include "rmlab/stieltjes.hpp"

namespace fs = std::filesystem;
using namespace rmlab;

namespace {

enum Exit { kPass = 0, kFail = 1, kUsage = 2, kNumerical = 3 };

const char* kMatrixFormat =
    "Matrix files: first line \"rows cols\", then one \"re im\" line per entry in row-major order.";
const char* kDefmFormat =
    "Deformation files: JSON {\"u\": [[[re, im], ...], ...], \"v\": [...]} holding the vectors u_t, v_t of "
    "E = sum_t u_t v_t^*.";

void require_file(const fs::path& p) {
  if (!fs::is_regular_file(p)) throw ConfigError("input file not found: " + p.string());
}

void require_writable_parent(const fs::path& p) {
  const auto parent = p.has_parent_path() ? p.parent_path() : fs::path(".");
  if (!fs::is_directory(parent)) throw ConfigError("output directory does not exist: " + parent.string());
}

// Writes to `path`, or to stdout when it is empty.
void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << text;
}

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x + 0.0);  // no "-0"
  return buf;
}

struct GenArgs {
  std::size_t n = 0, k = 0;
  std::string law = "real_gaussian";
  std::uint64_t seed = 0;
  std::string out;
};

struct ExperimentArgs {
  std::string spec, out;
  int workers = 1;
};

struct ReportArgs {
  std::string spec, records, out;
};

struct StieltjesArgs {
  double xi2 = 2.0;
  double eta = 1e-3;
  bool support = false;
  std::string curve;
};

struct OutlierArgs {
  std::string matrix, defm, out;
  std::optional<double> eps;
};

struct CharpolyArgs {
  std::string matrix, out;
  int order = 0;
};

struct EigArgs {
  std::string matrix, out;
  bool singular = false;
};

int cmd_gen(const GenArgs& a) {
  if (!a.out.empty()) require_writable_parent(a.out);
  EnsembleConfig cfg{a.n, a.k, EntryLaw::make(parse_law(a.law)), a.seed};
  cfg.validate();
  std::ostringstream os;
  io::write_matrix(os, sample_iid_matrix(cfg));
  emit(a.out, os.str());
  return kPass;
}

void print_report(const ExperimentReport& report) {
  for (const auto& c : report.criteria)
    std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << " = " << c.value << " (" << c.rule << ")\n";
  std::cout << report.spec.name << ": " << (report.pass ? "pass" : "fail") << " (" << report.n_flagged << " of "
            << report.spec.trials << " trials flagged)\n";
}

int cmd_experiment(const ExperimentArgs& a) {
  require_file(a.spec);
  if (a.workers < 1) throw ConfigError("--workers must be >= 1");
  auto spec = load_spec(a.spec);
  fs::create_directories(a.out);
  const RunOptions options{a.workers};
  const auto result = run(spec, options);
  write_run(a.out, result, options);
  print_report(result.report);
  return result.report.pass ? kPass : kFail;
}

int cmd_report(const ReportArgs& a) {
  require_file(a.spec);
  require_file(a.records);
  const auto report = aggregate(load_spec(a.spec), read_records(a.records));
  emit(a.out, report.to_json().dump(2) + "\n");
  return report.pass ? kPass : kFail;
}

int cmd_stieltjes(const StieltjesArgs& a) {
  if (!a.curve.empty()) require_writable_parent(a.curve);
  if (!(a.xi2 > 1.0)) throw ConfigError("--xi2 must be greater than 1");
  const double xi = std::sqrt(a.xi2);
  const auto sol = solve_m(cplx{0.0, a.eta}, xi);
  std::cout << "m(i eta) = " << fmt17(sol.m.real()) << " " << fmt17(sol.m.imag()) << "\n"
            << "im_m_over_eta = " << fmt17(sol.m.imag() / a.eta) << "\n"
            << "limit 1/(|xi|^2 - 1) = " << fmt17(1.0 / (a.xi2 - 1.0)) << "\n"
            << "residual = " << sol.residual << "\n";
  if (a.support) std::cout << to_json(support_estimate(xi), xi).dump(2) << "\n";
  if (!a.curve.empty()) {
    std::string csv = "eta,h,im_m_over_eta\n";
    for (double eta = 1.0; eta >= 0.99e-4; eta /= std::sqrt(10.0))
      csv += fmt17(eta) + "," + fmt17(h_eta(eta, xi)) + "," + fmt17(solve_m(cplx{0.0, eta}, xi).m.imag() / eta) + "\n";
    emit(a.curve, csv);
  }
  return kPass;
}

int cmd_outliers(const OutlierArgs& a) {
  require_file(a.matrix);
  require_file(a.defm);
  if (!a.out.empty()) require_writable_parent(a.out);
  const auto x = io::load_matrix(a.matrix);
  const auto defm = io::load_deformation(a.defm);
  defm.validate();
  if (defm.dim() != static_cast<std::size_t>(x.rows()) || x.rows() != x.cols())
    throw ConfigError("matrix and deformation dimensions disagree");
  const auto e_eigs = deformation_eigenvalues(defm);
  const double eps = a.eps ? *a.eps : default_eps(e_eigs);
  const auto report = outlier_report(eig(x + deformation_matrix(defm)), e_eigs, eps);
  emit(a.out, to_json(report).dump(2) + "\n");
  return kPass;
}

int cmd_charpoly(const CharpolyArgs& a) {
  require_file(a.matrix);
  if (!a.out.empty()) require_writable_parent(a.out);
  if (a.order < 0) throw ConfigError("--order must be nonnegative");
  const auto m = io::load_matrix(a.matrix);
  if (m.rows() != m.cols()) throw ConfigError("charpoly needs a square matrix");
  const auto series = newton_charpoly(trace_powers(m, a.order), a.order);
  std::string text;
  for (std::size_t k = 0; k < series.coeffs.size(); ++k)
    text += std::to_string(k) + " " + fmt17(series.coeffs[k].real()) + " " + fmt17(series.coeffs[k].imag()) + "\n";
  emit(a.out, text);
  return kPass;
}

int cmd_eig(const EigArgs& a) {
  require_file(a.matrix);
  if (!a.out.empty()) require_writable_parent(a.out);
  const auto m = io::load_matrix(a.matrix);
  std::ostringstream os;
  if (a.singular) {
    io::write_singular_values(os, singular_values(m).values);
  } else {
    const auto s = eig(m);
    if (s.flagged) std::cerr << "warning: " << s.diagnostic << "\n";
    io::write_spectrum(os, s.values);
  }
  emit(a.out, os.str());
  return kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rmlab: sparse non-Hermitian random matrix experiments"};
  app.require_subcommand(1);
  app.footer("Exit codes: 0 pass, 1 acceptance failure, 2 usage or config error, 3 numerical failure.");

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "Sample X = B.A/sqrt(k) with a Bernoulli(k/n) mask and write it");
  g->add_option("--n", gen.n, "Matrix dimension")->required()->check(CLI::PositiveNumber);
  g->add_option("--k", gen.k, "Sparsity parameter, 1 <= k <= n (expected nonzeros per row)")->required();
  g->add_option("--law", gen.law, "Entry law: real_gaussian, complex_gaussian, rademacher, uniform")
      ->capture_default_str();
  g->add_option("--seed", gen.seed, "64-bit seed")->capture_default_str();
  g->add_option("--out", gen.out, "Output matrix file (stdout when omitted)");
  g->footer(kMatrixFormat);

  ExperimentArgs exp;
  auto* e = app.add_subcommand("experiment", "Run a Monte Carlo experiment spec");
  e->add_option("--spec", exp.spec, "Experiment spec (JSON; see experiments/)")->required();
  e->add_option("--out", exp.out, "Output directory")->required();
  e->add_option("--workers", exp.workers, "Worker threads; results do not depend on it")->capture_default_str();
  e->footer(
      "Writes report.json, summary.csv (observable,mean,std,ci_low,ci_high,n_effective,n_flagged), records.jsonl "
      "(one trial per line) and run_info.json. Stieltjes curves add curve.csv (xi2,eta,h,im_m_over_eta); charpoly "
      "comparisons add samples.csv (trial,z_re,z_im,side,re,im).");

  ReportArgs rep;
  auto* r = app.add_subcommand("report", "Recompute a report from a spec and its raw records");
  r->add_option("--spec", rep.spec, "Experiment spec (JSON)")->required();
  r->add_option("--records", rep.records, "records.jsonl from an experiment run")->required();
  r->add_option("--out", rep.out, "Output report file (stdout when omitted)");

  StieltjesArgs st;
  auto* s = app.add_subcommand("stieltjes", "Solve the fixed point for m(i eta) of the hermitized Gaussian model");
  s->add_option("--xi2", st.xi2, "|xi|^2, must exceed 1")->capture_default_str();
  s->add_option("--eta", st.eta, "Imaginary part of the spectral argument w = i eta")->capture_default_str();
  s->add_flag("--support", st.support, "Also print the support estimate {xi, c, C, eta_small, threshold}");
  s->add_option("--curve", st.curve, "Write eta,h,im_m_over_eta for eta from 1 down to 1e-4 to this CSV");

  OutlierArgs out;
  auto* o = app.add_subcommand("outliers", "Outlier report for Y = X + E");
  o->add_option("--matrix", out.matrix, "Matrix file holding X")->required();
  o->add_option("--defm", out.defm, "Deformation file holding E")->required();
  o->add_option("--eps", out.eps, "Outlier margin: outliers have |lambda| >= 1 + eps (default from E)");
  o->add_option("--out", out.out, "Output JSON report (stdout when omitted)");
  o->footer(std::string(kMatrixFormat) + "\n" + kDefmFormat +
            "\nReport keys: eps, observed, predicted, hausdorff, count_match.");

  CharpolyArgs cp;
  auto* c = app.add_subcommand("charpoly", "Coefficients of det(I - zM) from Newton's identities");
  c->add_option("--matrix", cp.matrix, "Matrix file holding M")->required();
  c->add_option("--order", cp.order, "Highest coefficient index")->required();
  c->add_option("--out", cp.out, "Output file, one \"k re im\" line per coefficient (stdout when omitted)");
  c->footer(kMatrixFormat);

  EigArgs ea;
  auto* ev = app.add_subcommand("eig", "Eigenvalues (or singular values) of a matrix file");
  ev->add_option("--matrix", ea.matrix, "Matrix file")->required();
  ev->add_flag("--singular", ea.singular, "Print singular values, one per line, descending");
  ev->add_option("--out", ea.out, "Output file, one \"re im\" line per eigenvalue (stdout when omitted)");
  ev->footer(kMatrixFormat);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? kPass : kUsage;
  }

  try {
    if (*g) return cmd_gen(gen);
    if (*e) return cmd_experiment(exp);
    if (*r) return cmd_report(rep);
    if (*s) return cmd_stieltjes(st);
    if (*o) return cmd_outliers(out);
    if (*c) return cmd_charpoly(cp);
    if (*ev) return cmd_eig(ea);
  } catch (const ConfigError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kUsage;
  } catch (const DomainError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kUsage;
  } catch (const std::exception& err) {
    std::cerr << "numerical failure: " << err.what() << "\n";
    return kNumerical;
  }
  return kUsage;
}
