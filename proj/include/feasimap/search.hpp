#pragma once

// Sequential model-based search: Latin hypercube initialization, then
// fit-maximize-evaluate-augment until the expensive-evaluation budget is
// exhausted. One run owns its ledger, models and RNG streams.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "feasimap/acquisition.hpp"
#include "feasimap/cmaes.hpp"
#include "feasimap/gp.hpp"
#include "feasimap/problems.hpp"
#include "feasimap/rng.hpp"

namespace feasimap {

struct SearchConfig {
  std::string problem_id;
  std::optional<AcquisitionKind> acquisition;  // nullopt: LHS-only baseline
  std::size_t init_samples = 0;  // 0 -> dimension n (or budget for LHS-only)
  std::size_t budget = 0;        // 0 -> 11 n, counts the initial samples
  long acq_max_evals = 0;        // 0 -> 5000 n
  int rep_index = 0;
  std::uint64_t master_seed = 0;
  FitConfig fit;
  AcqOptions acq_options;
  RestartPolicy optimizer_restart;
  double optimizer_initial_sigma = 0.3;

  std::string method_name() const;
};

struct TraceRow {
  std::size_t iteration = 0;
  std::vector<double> x;
  std::vector<double> g;
  double acq_value = 0.0;  // NaN on initialization rows
  bool is_init = true;
};

struct RunTrace {
  std::vector<TraceRow> rows;
};

struct SearchResult {
  MultiSurrogate surrogate;
  RunTrace trace;
};

/// Called once per sequential iteration with the surrogate used to pick x and
/// the acquisition value that was logged for it.
using SearchObserver =
    std::function<void(std::size_t iteration, const MultiSurrogate& surrogate,
                       std::span<const double> x, double acq_value)>;

SearchResult run_search(const SearchConfig& config, const SearchObserver& observer = {});

/// Seed stream shared by the search and the harness; the initial design and
/// validation streams must not depend on the acquisition method.
std::uint64_t search_stream(std::uint64_t master_seed, const std::string& problem_id,
                            const std::string& purpose, int rep_index);

/// If candidate (normalized coordinates) is within `tolerance` of any row of
/// `existing` in max norm, nudge it with uniform noise of the given magnitude
/// (staying in the unit cube) until it clears every row.
std::vector<double> duplicate_guard(std::vector<double> candidate, const Matrix& existing,
                                    double tolerance, double noise_magnitude, Rng& rng);

/// Trace CSV: iter, x_0..x_{n-1}, g_0..g_{L-1}, acq_value, phase(init|seq).
std::string trace_to_csv(const RunTrace& trace, std::size_t dimension,
                         std::size_t num_constraints);

/// Inverse of trace_to_csv; round-trips exactly (values are written with 17
/// significant digits).
RunTrace trace_from_csv(const std::string& text);

}  // namespace feasimap
