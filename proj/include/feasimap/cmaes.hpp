#pragma once

// Global maximization over a box via (mu/mu_w, lambda) CMA-ES with BIPOP
// restarts: alternate doubling-population and small-population regimes until
// the evaluation budget runs out. The search itself runs in the unit cube;
// candidates are mapped to the caller's bounds before every objective call,
// so every evaluation the objective sees is inside the box.

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace feasimap {

struct RestartPolicy {
  int max_restarts = 9;
  double population_growth = 2.0;
};

struct OptimizerConfig {
  long max_evals = 0;  // callers usually set 5000 * dimension
  std::vector<std::pair<double, double>> bounds;
  std::uint64_t seed = 0;
  double initial_sigma = 0.3;  // fraction of box width
  RestartPolicy restart;
};

struct MaximizeResult {
  std::vector<double> x_best;
  double f_best = 0.0;
  long evals_used = 0;
};

using Objective = std::function<double(std::span<const double>)>;

MaximizeResult maximize(const Objective& f, const OptimizerConfig& config);

}  // namespace feasimap
