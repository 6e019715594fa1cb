#pragma once

// Experiment orchestration: run (problem x method x rep) campaigns on a
// worker pool, persist traces/models/confusion matrices, keep a manifest so
// interrupted campaigns resume instead of recomputing, and render summary
// reports.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "feasimap/metrics.hpp"

namespace feasimap {

struct CampaignConfig {
  std::vector<std::string> problems;
  std::vector<std::string> methods;  // lhs-only | knudde | tmse | bichon | ranjan | echard | pbe
  int reps = 21;
  int validation_samples = 10000;
  int budget_multiplier = 11;
  int acq_eval_multiplier = 5000;
  std::uint64_t master_seed = 1;
  std::string output_dir = "out";
  int workers = 0;  // 0: hardware concurrency
  std::optional<double> pbe_entropy_floor;
  int gp_restarts = 10;

  void validate() const;
};

/// Parse the TOML config subset used here (flat `key = value` lines, string
/// arrays, # comments). Unknown keys are errors.
CampaignConfig load_campaign_config(const std::string& path);

struct RunRecord {
  std::string problem, method;
  int rep = 0;
  bool aborted = false;
  std::string error;
  double informedness_value = 0.0;  // NaN when undefined or aborted
  ConfusionMatrix cm;
  std::string trace_file, model_file;
};

struct CampaignOutcome {
  int executed = 0;
  int skipped = 0;
  int aborted = 0;
  std::string summary_path;
};

/// Execute every (problem, method, rep) not already in the manifest, then
/// rebuild summary.csv. Safe to re-run; completed triples are skipped.
CampaignOutcome run_campaign(const CampaignConfig& config);

/// Evaluate a stored multi-surrogate on a grid and return CSV rows
/// `x..., mu_l..., sigma_l..., p_feasible, predicted_label, true_label`.
/// Only 1-D and 2-D problems are supported.
std::string emit_grid(const std::string& problem_id, const std::string& model_file,
                      std::size_t resolution);

/// Read a campaign manifest and render the per-problem method table with
/// best/equivalent flags.
std::string compare_report(const std::string& output_dir);

}  // namespace feasimap
