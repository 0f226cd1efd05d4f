#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rmlab/ensemble.hpp"
#include "rmlab/stats.hpp"

#include <json.hpp>

namespace rmlab {

enum class ExperimentKind {
  SpectralRadius,
  CircularLaw,
  OutlierHausdorff,
  LambdaMax,
  Overlap,
  CharpolyEquivalence,
  UniversalitySmin,
  UniversalityResolvent,
  StieltjesCurve,
};

std::string to_string(ExperimentKind kind);
ExperimentKind parse_kind(const std::string& name);

/// How the deformation of an experiment is built. Fixed across trials.
///   {"type": "spiked", "eigenvalues": [[re, im], ...], "seed": s}
///   {"type": "basis", "eigenvalues": [[re, im], ...]}  (theta_t e_t e_t^*)
///   {"type": "constant", "eigenvalues": [[re, im]]}    (theta 1 1^* / n)
///   {"type": "file", "path": "..."}
struct DeformationSpec {
  nlohmann::json source;

  Deformation build(std::size_t n) const;
};

struct ExperimentSpec {
  std::string name;
  ExperimentKind kind = ExperimentKind::SpectralRadius;
  EnsembleConfig ensemble;
  std::optional<DeformationSpec> deformation;
  int trials = 1;
  std::uint64_t master_seed = 0;
  /// Kind-specific parameters (eps, z_grid, xi, eta, alpha, tolerances).
  /// validate() fills in defaults for anything omitted.
  nlohmann::json params = nlohmann::json::object();

  /// Throws ConfigError on missing or inconsistent fields.
  void validate();

  static ExperimentSpec from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

ExperimentSpec load_spec(const std::filesystem::path& path);

struct TrialRecord {
  std::uint64_t trial_index = 0;
  std::uint64_t derived_seed = 0;
  nlohmann::json observables = nlohmann::json::object();  ///< name -> number or array
  std::vector<std::string> flags;

  bool flagged() const { return !flags.empty(); }
  nlohmann::json to_json() const;
  static TrialRecord from_json(const nlohmann::json& j);
};

struct ObservableSummary {
  Summary stats;
  std::size_t n_effective = 0;
  std::size_t n_flagged = 0;
};

/// Summary of a scalar observable over the unflagged records. Throws
/// ConfigError when no record carries it.
ObservableSummary summarize(const std::vector<TrialRecord>& records, const std::string& observable);

struct Criterion {
  std::string name;
  double value = 0.0;
  std::string rule;  ///< human-readable comparison, e.g. "<= 0.05"
  bool pass = false;
};

struct ExperimentReport {
  ExperimentSpec spec;
  std::map<std::string, ObservableSummary> summaries;
  std::map<std::string, std::size_t> flag_counts;
  nlohmann::json statistics = nlohmann::json::object();
  std::vector<Criterion> criteria;
  std::size_t n_flagged = 0;
  bool pass = false;

  nlohmann::json to_json() const;
  std::string summary_csv() const;
};

/// Trial seed h(master, t, kind). Role streams inside a trial derive from it.
std::uint64_t trial_seed(const ExperimentSpec& spec, std::uint64_t trial);

/// Executes one trial. Hard errors become flags ("error: ...").
TrialRecord run_trial(const ExperimentSpec& spec, const Deformation* defm, std::uint64_t trial);

struct RunOptions {
  int workers = 1;
};

struct RunResult {
  ExperimentReport report;
  std::vector<TrialRecord> records;  ///< sorted by trial_index
  double wall_seconds = 0.0;
};

/// Runs all trials on a pool of workers and aggregates. Records are sorted
/// by trial index before reduction, so the result does not depend on the
/// number of workers or on completion order.
RunResult run(ExperimentSpec spec, const RunOptions& options = {});

/// Pure reduction step: recomputes the report from raw records.
ExperimentReport aggregate(const ExperimentSpec& spec, std::vector<TrialRecord> records);

// On-disk layout of a run directory: report.json, summary.csv, records.jsonl
// and run_info.json (wall time, worker count; not part of the report).
void write_run(const std::filesystem::path& dir, const RunResult& result, const RunOptions& options);
std::vector<TrialRecord> read_records(const std::filesystem::path& jsonl);

/// Extra CSV output for kinds that have one: (eta, h, im_m_over_eta) for the
/// Stieltjes curve, and per-trial (trial, re, im) samples for the charpoly
/// comparison. Empty string otherwise.
std::string curve_csv(const RunResult& result);

}  // namespace rmlab
