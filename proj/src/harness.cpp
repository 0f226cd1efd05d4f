#include "rmlab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "experiments.hpp"
#include "lapack.hpp"
#include "rmlab/matrix_io.hpp"

namespace rmlab {

using nlohmann::json;

namespace {

constexpr double kMaxFlaggedFraction = 0.2;

const std::pair<ExperimentKind, const char*> kKindNames[] = {
    {ExperimentKind::SpectralRadius, "spectral_radius"},
    {ExperimentKind::CircularLaw, "circular_law"},
    {ExperimentKind::OutlierHausdorff, "outlier_hausdorff"},
    {ExperimentKind::LambdaMax, "lambda_max"},
    {ExperimentKind::Overlap, "overlap"},
    {ExperimentKind::CharpolyEquivalence, "charpoly_equivalence"},
    {ExperimentKind::UniversalitySmin, "universality_smin"},
    {ExperimentKind::UniversalityResolvent, "universality_resolvent"},
    {ExperimentKind::StieltjesCurve, "stieltjes_curve"},
};

std::vector<cplx> eigenvalue_list(const json& j) {
  if (!j.is_array() || j.empty()) throw ConfigError("deformation 'eigenvalues' must be a non-empty list");
  std::vector<cplx> out;
  for (const auto& v : j) out.push_back(detail::json_to_complex(v));
  return out;
}

// "error: singular matrix" -> "error"; plain tags stay as they are.
std::string flag_key(const std::string& flag) { return flag.substr(0, flag.find(':')); }

std::string csv_number(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  for (const auto& [k, name] : kKindNames)
    if (k == kind) return name;
  return "unknown";
}

ExperimentKind parse_kind(const std::string& name) {
  for (const auto& [k, n] : kKindNames)
    if (name == n) return k;
  throw ConfigError("unknown experiment kind '" + name + "'");
}

Deformation DeformationSpec::build(std::size_t n) const {
  const auto type = source.value("type", std::string{});
  Deformation d;
  if (type == "spiked") {
    d = spiked_deformation(n, eigenvalue_list(source.at("eigenvalues")), source.value("seed", std::uint64_t{0}));
  } else if (type == "basis") {
    const auto thetas = eigenvalue_list(source.at("eigenvalues"));
    if (thetas.size() > n) throw ConfigError("basis deformation: rank exceeds n");
    for (std::size_t t = 0; t < thetas.size(); ++t)
      d.pairs.emplace_back(thetas[t] * basis_vector(n, t), basis_vector(n, t));
  } else if (type == "constant") {
    const auto thetas = eigenvalue_list(source.at("eigenvalues"));
    if (thetas.size() != 1) throw ConfigError("constant deformation takes exactly one eigenvalue");
    d.pairs.emplace_back(thetas[0] * constant_vector(n), constant_vector(n));
  } else if (type == "file") {
    d = io::load_deformation(source.at("path").get<std::string>());
  } else {
    throw ConfigError("unknown deformation type '" + type + "' (expected spiked, basis, constant or file)");
  }
  d.validate();
  if (d.dim() != n) throw ConfigError("deformation dimension does not match the ensemble n");
  return d;
}

void ExperimentSpec::validate() {
  if (name.empty()) throw ConfigError("experiment name must be non-empty");
  if (trials < 1) throw ConfigError("trials must be >= 1");
  if (detail::uses_ensemble(kind)) ensemble.validate();
  detail::complete_params(kind, params, deformation.has_value());
}

ExperimentSpec ExperimentSpec::from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("experiment spec must be an object");
  ExperimentSpec s;
  try {
    s.name = j.at("name").get<std::string>();
    s.kind = parse_kind(j.at("kind").get<std::string>());
    if (j.contains("ensemble")) {
      const auto& e = j["ensemble"];
      s.ensemble.n = e.at("n").get<std::size_t>();
      s.ensemble.k = e.at("k").get<std::size_t>();
      s.ensemble.law = EntryLaw::make(parse_law(e.at("law").get<std::string>()));
    } else if (detail::uses_ensemble(s.kind)) {
      throw ConfigError("missing 'ensemble'");
    }
    if (j.contains("deformation") && !j["deformation"].is_null()) s.deformation = DeformationSpec{j["deformation"]};
    s.trials = j.value("trials", 1);
    s.master_seed = j.value("master_seed", std::uint64_t{0});
    s.ensemble.seed = s.master_seed;
    if (j.contains("params")) s.params = j["params"];
  } catch (const json::exception& e) {
    throw ConfigError(std::string("experiment spec: ") + e.what());
  }
  s.validate();
  return s;
}

json ExperimentSpec::to_json() const {
  json j;
  j["name"] = name;
  j["kind"] = rmlab::to_string(kind);
  if (detail::uses_ensemble(kind))
    j["ensemble"] = {{"n", ensemble.n}, {"k", ensemble.k}, {"law", rmlab::to_string(ensemble.law.family)}};
  if (deformation) j["deformation"] = deformation->source;
  j["trials"] = trials;
  j["master_seed"] = master_seed;
  j["params"] = params;
  return j;
}

ExperimentSpec load_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open spec file " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("spec file " + path.string() + ": " + e.what());
  }
  // Relative deformation files resolve against the spec's directory.
  if (j.contains("deformation") && j["deformation"].value("type", "") == "file") {
    std::filesystem::path p = j["deformation"]["path"].get<std::string>();
    if (p.is_relative()) j["deformation"]["path"] = (path.parent_path() / p).string();
  }
  return ExperimentSpec::from_json(j);
}

json TrialRecord::to_json() const {
  return {{"trial_index", trial_index}, {"seed", derived_seed}, {"observables", observables}, {"flags", flags}};
}

TrialRecord TrialRecord::from_json(const json& j) {
  TrialRecord r;
  r.trial_index = j.at("trial_index").get<std::uint64_t>();
  r.derived_seed = j.at("seed").get<std::uint64_t>();
  r.observables = j.at("observables");
  r.flags = j.at("flags").get<std::vector<std::string>>();
  return r;
}

ObservableSummary summarize(const std::vector<TrialRecord>& records, const std::string& observable) {
  ObservableSummary out;
  std::vector<double> values;
  bool present = false;
  for (const auto& r : records) {
    const bool has = r.observables.contains(observable) && r.observables[observable].is_number();
    present = present || has;
    if (r.flagged()) {
      ++out.n_flagged;
    } else if (has) {
      values.push_back(r.observables[observable].get<double>());
    }
  }
  if (!present) throw ConfigError("no record carries observable '" + observable + "'");
  out.n_effective = values.size();
  if (!values.empty()) {
    out.stats = summarize_values(values);
  } else {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    out.stats = Summary{nan, nan, nan, nan, 0};
  }
  return out;
}

json ExperimentReport::to_json() const {
  json j;
  j["spec"] = spec.to_json();
  j["trials"] = spec.trials;
  j["n_flagged"] = n_flagged;
  j["flag_counts"] = flag_counts;
  json sums = json::object();
  for (const auto& [name, s] : summaries) {
    sums[name] = {{"mean", s.stats.mean},
                  {"std", s.stats.std},
                  {"ci95", {s.stats.ci_low, s.stats.ci_high}},
                  {"n_effective", s.n_effective},
                  {"n_flagged", s.n_flagged}};
  }
  j["summaries"] = sums;
  j["statistics"] = statistics;
  json crit = json::array();
  for (const auto& c : criteria) crit.push_back({{"name", c.name}, {"value", c.value}, {"rule", c.rule}, {"pass", c.pass}});
  j["criteria"] = crit;
  j["pass"] = pass;
  return j;
}

std::string ExperimentReport::summary_csv() const {
  std::string out = "observable,mean,std,ci_low,ci_high,n_effective,n_flagged\n";
  for (const auto& [name, s] : summaries) {
    out += name + "," + csv_number(s.stats.mean) + "," + csv_number(s.stats.std) + "," + csv_number(s.stats.ci_low) +
           "," + csv_number(s.stats.ci_high) + "," + std::to_string(s.n_effective) + "," +
           std::to_string(s.n_flagged) + "\n";
  }
  return out;
}

std::uint64_t trial_seed(const ExperimentSpec& spec, std::uint64_t trial) {
  return derive_seed(spec.master_seed, trial, to_string(spec.kind));
}

TrialRecord run_trial(const ExperimentSpec& spec, const Deformation* defm, std::uint64_t trial) {
  TrialRecord record;
  record.trial_index = trial;
  record.derived_seed = trial_seed(spec, trial);
  try {
    detail::execute_trial(spec, defm, record);
  } catch (const std::exception& e) {
    record.flags.push_back(std::string("error: ") + e.what());
  }
  return record;
}

ExperimentReport aggregate(const ExperimentSpec& spec, std::vector<TrialRecord> records) {
  std::sort(records.begin(), records.end(),
            [](const TrialRecord& a, const TrialRecord& b) { return a.trial_index < b.trial_index; });
  ExperimentReport report;
  report.spec = spec;
  std::set<std::string> names;
  for (const auto& r : records) {
    if (r.flagged()) ++report.n_flagged;
    for (const auto& f : r.flags) ++report.flag_counts[flag_key(f)];
    for (const auto& [key, value] : r.observables.items())
      if (value.is_number()) names.insert(key);
  }
  for (const auto& name : names) report.summaries[name] = summarize(records, name);

  detail::evaluate(spec, records, report);

  const double flagged_fraction =
      records.empty() ? 1.0 : static_cast<double>(report.n_flagged) / static_cast<double>(records.size());
  report.criteria.push_back({"flagged_fraction", flagged_fraction, "<= 0.2", flagged_fraction <= kMaxFlaggedFraction});
  report.pass = std::all_of(report.criteria.begin(), report.criteria.end(), [](const Criterion& c) { return c.pass; });
  return report;
}

RunResult run(ExperimentSpec spec, const RunOptions& options) {
  spec.validate();
  lapack::use_single_thread();
  const auto start = std::chrono::steady_clock::now();

  std::optional<Deformation> defm;
  if (spec.deformation) defm = spec.deformation->build(spec.ensemble.n);
  const Deformation* dptr = defm ? &*defm : nullptr;

  const auto n_trials = static_cast<std::size_t>(spec.trials);
  std::vector<TrialRecord> records(n_trials);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t t = next++; t < n_trials; t = next++) records[t] = run_trial(spec, dptr, t);
  };
  const int workers = std::clamp(options.workers, 1, static_cast<int>(n_trials));
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  RunResult result;
  result.report = aggregate(spec, records);
  result.records = std::move(records);
  result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

void write_run(const std::filesystem::path& dir, const RunResult& result, const RunOptions& options) {
  std::filesystem::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream out(dir / name);
    if (!out) throw ConfigError("cannot write " + (dir / name).string());
    return out;
  };
  open("report.json") << result.report.to_json().dump(2) << "\n";
  open("summary.csv") << result.report.summary_csv();
  {
    auto out = open("records.jsonl");
    for (const auto& r : result.records) out << r.to_json().dump() << "\n";
  }
  open("run_info.json") << json{{"wall_seconds", result.wall_seconds}, {"workers", options.workers}}.dump(2) << "\n";
  const auto csv = curve_csv(result);
  if (!csv.empty())
    open(result.report.spec.kind == ExperimentKind::StieltjesCurve ? "curve.csv" : "samples.csv") << csv;
}

std::vector<TrialRecord> read_records(const std::filesystem::path& jsonl) {
  std::ifstream in(jsonl);
  if (!in) throw ConfigError("cannot open records file " + jsonl.string());
  std::vector<TrialRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      out.push_back(TrialRecord::from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw ConfigError("records file " + jsonl.string() + ": " + e.what());
    }
  }
  return out;
}

std::string curve_csv(const RunResult& result) {
  const auto kind = result.report.spec.kind;
  std::string out;
  if (kind == ExperimentKind::StieltjesCurve) {
    out = "xi2,eta,h,im_m_over_eta\n";
    for (const auto& r : result.records) {
      if (!r.observables.contains("curves")) continue;
      for (const auto& c : r.observables["curves"])
        for (const auto& row : c["rows"])
          out += csv_number(c["xi2"].get<double>()) + "," + csv_number(row[0].get<double>()) + "," +
                 csv_number(row[1].get<double>()) + "," + csv_number(row[2].get<double>()) + "\n";
    }
  } else if (kind == ExperimentKind::CharpolyEquivalence) {
    out = "trial,z_re,z_im,side,re,im\n";
    const auto& grid = result.report.spec.params.at("z_grid");
    for (const auto& r : result.records) {
      for (const char* side : {"q", "limit", "gn"}) {
        if (!r.observables.contains(side)) continue;
        const auto& vals = r.observables[side];
        for (std::size_t i = 0; i < vals.size() && i < grid.size(); ++i) {
          const cplx z = detail::json_to_complex(grid[i]);
          out += std::to_string(r.trial_index) + "," + csv_number(z.real()) + "," + csv_number(z.imag()) + "," +
                 side + "," + csv_number(vals[i][0].get<double>()) + "," + csv_number(vals[i][1].get<double>()) + "\n";
        }
      }
    }
  }
  return out;
}

}  // namespace rmlab
