#pragma once

#include <string>
#include <vector>

#include "reinforce/experiment.hpp"

namespace reinforce {

// Strict config parsing: unknown keys anywhere are rejected.
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

ordered_json result_to_json(const ReplicateResult& r);

// All writers are atomic: content goes to a temp file in the target
// directory, then renames over the destination. UTF-8, LF line endings.
void write_jsonl(const std::string& path,
                 const std::vector<ReplicateResult>& results);
void write_csv(const std::string& path,
               const std::vector<ReplicateResult>& results);
void write_summary_json(const std::string& path, const ordered_json& summary);

// Confinement curves: horizon, estimate, ci_low, ci_high per row.
struct ConfinementCurvePoint {
  std::int64_t horizon = 0;
  double estimate = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};
void write_confinement_csv(const std::string& path,
                           const std::vector<ConfinementCurvePoint>& curve);

// Writes jsonl/csv/summary according to config.format under config.out.
void write_outputs(const ExperimentOutput& output);

// Re-reads a JSONL file into the per-replicate summaries the aggregator
// consumes and recomputes the summary; used to verify round-trip fidelity.
ordered_json summary_from_jsonl(const ExperimentConfig& config,
                                const std::string& jsonl_path);

}  // namespace reinforce
