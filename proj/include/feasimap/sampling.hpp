#pragma once

// Seeded space-filling and uniform designs. Latin hypercube is the plain
// random-permutation variant with uniform jitter inside each stratum; no
// maximin optimization.

#include <cstdint>
#include <utility>
#include <vector>

#include "feasimap/linalg.hpp"

namespace feasimap {

struct SamplePlan {
  std::size_t count = 0;
  std::size_t dimension = 0;
  std::vector<std::pair<double, double>> bounds;
  std::uint64_t seed = 0;

  void validate() const;
};

/// count x dimension points; per dimension exactly one point per stratum.
Matrix latin_hypercube(const SamplePlan& plan);

/// count x dimension i.i.d. uniform points over the box.
Matrix uniform_random(const SamplePlan& plan);

}  // namespace feasimap
