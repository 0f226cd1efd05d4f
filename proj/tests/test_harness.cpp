#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "rmlab/harness.hpp"

using namespace rmlab;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json small_spec(const std::string& kind) {
  return {{"name", "t_" + kind},
          {"kind", kind},
          {"ensemble", {{"n", 60}, {"k", 12}, {"law", "rademacher"}}},
          {"trials", 9},
          {"master_seed", 17}};
}

std::string dump_records(const std::vector<TrialRecord>& records) {
  std::string out;
  for (const auto& r : records) out += r.to_json().dump() + "\n";
  return out;
}

fs::path temp_dir(const std::string& name) {
  auto p = fs::temp_directory_path() / ("rmlab_harness_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("experiment kinds round-trip through their names") {
  for (auto k : {ExperimentKind::SpectralRadius, ExperimentKind::CircularLaw, ExperimentKind::OutlierHausdorff,
                 ExperimentKind::LambdaMax, ExperimentKind::Overlap, ExperimentKind::CharpolyEquivalence,
                 ExperimentKind::UniversalitySmin, ExperimentKind::UniversalityResolvent,
                 ExperimentKind::StieltjesCurve})
    CHECK(parse_kind(to_string(k)) == k);
  CHECK_THROWS_AS(parse_kind("nope"), ConfigError);
}

TEST_CASE("spec validation") {
  auto j = small_spec("spectral_radius");
  const auto spec = ExperimentSpec::from_json(j);
  CHECK(spec.params["tail_threshold"] == 1.25);
  CHECK(spec.to_json()["params"]["mean_range"] == json::array({0.9, 1.1}));

  auto bad = j;
  bad["trials"] = 0;
  CHECK_THROWS_AS(ExperimentSpec::from_json(bad), ConfigError);
  bad = j;
  bad["ensemble"]["k"] = 100;
  CHECK_THROWS_AS(ExperimentSpec::from_json(bad), ConfigError);
  bad = j;
  bad.erase("ensemble");
  CHECK_THROWS_AS(ExperimentSpec::from_json(bad), ConfigError);
  bad = j;
  bad["kind"] = "lambda_max";  // needs a deformation
  CHECK_THROWS_AS(ExperimentSpec::from_json(bad), ConfigError);
  bad = small_spec("charpoly_equivalence");  // needs z_grid
  CHECK_THROWS_AS(ExperimentSpec::from_json(bad), ConfigError);
  bad["params"] = {{"z_grid", {0.9}}};
  CHECK_THROWS_AS(ExperimentSpec::from_json(bad), ConfigError);
  bad = small_spec("universality_resolvent");
  bad["params"] = {{"xi", 0.5}};
  CHECK_THROWS_AS(ExperimentSpec::from_json(bad), ConfigError);
}

TEST_CASE("bundled specs parse") {
  int count = 0;
  for (const auto& entry : fs::directory_iterator(RMLAB_EXPERIMENTS_DIR)) {
    if (entry.path().extension() != ".json") continue;
    CAPTURE(entry.path().string());
    const auto spec = load_spec(entry.path());
    CHECK(spec.name == entry.path().stem().string());
    ++count;
  }
  CHECK(count >= 10);
}

TEST_CASE("deformation specs") {
  const auto spiked = DeformationSpec{{{"type", "spiked"}, {"eigenvalues", {2.0, {1.5, 0.8}}}, {"seed", 1}}}.build(30);
  CHECK(spiked.rank() == 2);
  const auto basis = DeformationSpec{{{"type", "basis"}, {"eigenvalues", {3.0}}}}.build(5);
  CHECK(deformation_matrix(basis)(0, 0) == cplx(3.0));
  const auto constant = DeformationSpec{{{"type", "constant"}, {"eigenvalues", {2.0}}}}.build(4);
  CHECK(std::abs(deformation_matrix(constant)(1, 2) - 0.5) < 1e-15);
  CHECK_THROWS_AS((DeformationSpec{{{"type", "magic"}}}.build(4)), ConfigError);
  CHECK_THROWS_AS((DeformationSpec{{{"type", "file"}, {"path", "/nonexistent.json"}}}.build(4)), ConfigError);
}

TEST_CASE("trial seeds follow the derivation rule") {
  const auto spec = ExperimentSpec::from_json(small_spec("spectral_radius"));
  CHECK(trial_seed(spec, 3) == derive_seed(17, 3, "spectral_radius"));
  const auto rec = run_trial(spec, nullptr, 3);
  CHECK(rec.derived_seed == trial_seed(spec, 3));
  CHECK(rec.trial_index == 3);
  CHECK(rec.observables.contains("rho"));
  CHECK(run_trial(spec, nullptr, 3).to_json() == rec.to_json());
}

TEST_CASE("summarize") {
  std::vector<TrialRecord> records(10);
  for (std::size_t i = 0; i < records.size(); ++i) {
    records[i].trial_index = i;
    records[i].observables["x"] = 3.0;
  }
  auto s = summarize(records, "x");
  CHECK(s.stats.mean == 3.0);
  CHECK(s.stats.std == 0.0);
  CHECK(s.stats.ci_low == 3.0);
  CHECK(s.stats.ci_high == 3.0);
  CHECK(s.n_effective == 10);

  std::vector<TrialRecord> two(2);
  two[0].observables["y"] = 1.0;
  two[1].observables["y"] = 3.0;
  const auto t = summarize(two, "y");
  CHECK(t.stats.mean == 2.0);
  CHECK(t.stats.std == doctest::Approx(std::sqrt(2.0)));

  records[2].flags.push_back("no-unique-outlier");
  records[5].flags.push_back("error: boom");
  s = summarize(records, "x");
  CHECK(s.n_effective == 8);
  CHECK(s.n_flagged == 2);
  CHECK(s.n_effective + s.n_flagged == records.size());
  CHECK_THROWS_AS(summarize(records, "missing"), ConfigError);
}

TEST_CASE("worker count does not change the records") {
  for (const char* kind : {"spectral_radius", "lambda_max", "universality_resolvent"}) {
    auto j = small_spec(kind);
    if (std::string(kind) == "lambda_max")
      j["deformation"] = {{"type", "spiked"}, {"eigenvalues", {2.5}}, {"seed", 2}};
    const auto spec = ExperimentSpec::from_json(j);
    const auto one = run(spec, {1});
    const auto three = run(spec, {3});
    CAPTURE(kind);
    CHECK(dump_records(one.records) == dump_records(three.records));
    CHECK(one.report.to_json() == three.report.to_json());
  }
}

TEST_CASE("records suffice to rebuild the report") {
  auto j = small_spec("outlier_hausdorff");
  j["deformation"] = {{"type", "spiked"}, {"eigenvalues", {3.0, {0.0, 2.5}}}, {"seed", 4}};
  const auto spec = ExperimentSpec::from_json(j);
  const auto result = run(spec, {2});
  const auto dir = temp_dir("rebuild");
  write_run(dir, result, {2});
  for (const char* f : {"report.json", "summary.csv", "records.jsonl", "run_info.json"}) CHECK(fs::exists(dir / f));

  const auto back = read_records(dir / "records.jsonl");
  CHECK(dump_records(back) == dump_records(result.records));
  const auto rebuilt = aggregate(spec, back);
  CHECK(rebuilt.to_json().dump(2) == result.report.to_json().dump(2));
  std::ifstream in(dir / "report.json");
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == rebuilt.to_json().dump(2) + "\n");
  CHECK(rebuilt.summary_csv() == result.report.summary_csv());
  fs::remove_all(dir);
}

TEST_CASE("hard errors become flags and fail the experiment") {
  auto j = small_spec("overlap");
  j["deformation"] = {{"type", "spiked"}, {"eigenvalues", {2.0, 3.0}}, {"seed", 1}};  // overlap needs rank one
  const auto result = run(ExperimentSpec::from_json(j), {1});
  CHECK(result.records.size() == 9);
  CHECK(result.report.n_flagged == 9);
  CHECK(result.report.flag_counts.at("error") == 9);
  CHECK_FALSE(result.report.pass);
  bool saw = false;
  for (const auto& c : result.report.criteria)
    if (c.name == "flagged_fraction") saw = !c.pass && c.value == 1.0;
  CHECK(saw);
}

TEST_CASE("flagged fraction above one fifth fails") {
  auto spec = ExperimentSpec::from_json(small_spec("spectral_radius"));
  std::vector<TrialRecord> records;
  for (std::uint64_t t = 0; t < 10; ++t) {
    TrialRecord r;
    r.trial_index = t;
    r.observables["rho"] = 1.0;
    if (t < 2) r.flags.push_back("eig-flagged: test");
    records.push_back(r);
  }
  CHECK(aggregate(spec, records).pass);  // 2 of 10 is allowed
  records[2].flags.push_back("eig-flagged: test");
  CHECK_FALSE(aggregate(spec, records).pass);
}

TEST_CASE("aggregation ignores record order") {
  const auto spec = ExperimentSpec::from_json(small_spec("circular_law"));
  auto result = run(spec, {1});
  auto shuffled = result.records;
  std::reverse(shuffled.begin(), shuffled.end());
  CHECK(aggregate(spec, shuffled).to_json() == result.report.to_json());
}

TEST_CASE("lambda max experiment observables") {
  auto j = small_spec("lambda_max");
  j["ensemble"]["n"] = 150;
  j["ensemble"]["k"] = 150;
  j["deformation"] = {{"type", "spiked"}, {"eigenvalues", {2.5}}, {"seed", 2}};
  j["params"] = {{"secular", true}};
  const auto result = run(ExperimentSpec::from_json(j), {1});
  for (const auto& r : result.records) {
    if (r.flagged()) continue;
    CHECK(r.observables["secular_err"].get<double>() < 1e-6);
  }
  CHECK(result.report.summaries.count("lambda_err") == 1);
}

TEST_CASE("Stieltjes curve experiment") {
  const auto spec = load_spec(fs::path(RMLAB_EXPERIMENTS_DIR) / "stieltjes_curve.json");
  const auto result = run(spec);
  CHECK(result.report.pass);
  const auto csv = curve_csv(result);
  CHECK(csv.rfind("xi2,eta,h,im_m_over_eta\n", 0) == 0);
  CHECK(csv.find("\n2,0.001,") != std::string::npos);
}

TEST_CASE("charpoly experiment writes samples") {
  auto j = small_spec("charpoly_equivalence");
  j["ensemble"] = {{"n", 40}, {"k", 10}, {"law", "real_gaussian"}};
  j["trials"] = 30;
  j["params"] = {{"z_grid", {0.3, {0.0, 0.4}}}};
  const auto result = run(ExperimentSpec::from_json(j), {1});
  CHECK(result.report.statistics.contains("equivalence"));
  const auto csv = curve_csv(result);
  CHECK(csv.rfind("trial,z_re,z_im,side,re,im\n", 0) == 0);
  // 30 trials x 2 grid points x 2 sides.
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 120);
}
