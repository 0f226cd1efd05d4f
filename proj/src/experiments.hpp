#pragma once

// Per-kind trial bodies and acceptance rules. Internal to the harness.

#include "rmlab/harness.hpp"

namespace rmlab::detail {

cplx json_to_complex(const nlohmann::json& j);
nlohmann::json complex_to_json(cplx z);

/// Fills defaults and checks required keys; throws ConfigError.
void complete_params(ExperimentKind kind, nlohmann::json& params, bool has_deformation);

bool uses_ensemble(ExperimentKind kind);

/// Fills record.observables / record.flags. May throw; the caller turns
/// exceptions into flags.
void execute_trial(const ExperimentSpec& spec, const Deformation* defm, TrialRecord& record);

/// Kind-specific statistics and pass/fail criteria over sorted records.
void evaluate(const ExperimentSpec& spec, const std::vector<TrialRecord>& records, ExperimentReport& report);

}  // namespace rmlab::detail
