#pragma once

// Benchmark constraint suite: five CEC2006 problems restricted to their
// inequality constraints (objectives dropped), plus a 1-D two-sine demo.
// Everything is exposed behind one expensive-evaluation interface with a
// call ledger.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace feasimap {

struct ProblemSpec {
  std::string id;
  std::size_t dimension = 0;
  std::vector<std::pair<double, double>> bounds;
  std::size_t num_constraints = 0;
  std::vector<double> thresholds;
  double reference_rho = 0.0;  // feasible-volume percentage

  void (*constraints)(const double* x, double* g) = nullptr;
};

/// Lookup by CLI id: g4 | g8 | g9 | g19 | g24 | demo1d. Unknown -> InputError.
const ProblemSpec& problem_by_id(const std::string& id);
std::vector<std::string> problem_ids();

/// Count and log of expensive evaluations; optionally capped.
class EvaluationLedger {
 public:
  EvaluationLedger() = default;
  explicit EvaluationLedger(std::size_t cap) : cap_(cap), capped_(true) {}

  std::size_t calls() const { return xs_.size(); }
  std::span<const std::vector<double>> inputs() const { return xs_; }
  std::span<const std::vector<double>> responses() const { return gs_; }

  void record(std::vector<double> x, std::vector<double> g);

 private:
  std::vector<std::vector<double>> xs_, gs_;
  std::size_t cap_ = 0;
  bool capped_ = false;
};

/// Evaluate all constraints at x (within bounds), appending to the ledger.
std::vector<double> evaluate_constraints(const ProblemSpec& spec, std::span<const double> x,
                                         EvaluationLedger& ledger);

/// Ground-truth label: all g_l(x) <= t_l (inclusive).
bool true_feasible(const ProblemSpec& spec, std::span<const double> x);

/// Feasible-volume percentage by uniform Monte Carlo.
double monte_carlo_rho(const ProblemSpec& spec, std::size_t samples, std::uint64_t seed);

}  // namespace feasimap
