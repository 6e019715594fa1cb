#include "feasimap/sampling.hpp"

#include <numeric>

#include "feasimap/errors.hpp"
#include "feasimap/rng.hpp"

namespace feasimap {

void SamplePlan::validate() const {
  if (count < 1) throw InputError("SamplePlan: count must be >= 1");
  if (dimension < 1) throw InputError("SamplePlan: dimension must be >= 1");
  if (bounds.size() != dimension) throw InputError("SamplePlan: bounds size != dimension");
  for (const auto& [lo, hi] : bounds)
    if (!(lo < hi)) throw InputError("SamplePlan: bounds must have lo < hi");
}

Matrix latin_hypercube(const SamplePlan& plan) {
  plan.validate();
  Rng rng(derive_seed(plan.seed, "lhs"));
  Matrix points(plan.count, plan.dimension);
  std::vector<std::size_t> perm(plan.count);
  for (std::size_t d = 0; d < plan.dimension; ++d) {
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (std::size_t i = plan.count; i-- > 1;)
      std::swap(perm[i], perm[rng.below(i + 1)]);
    const auto [lo, hi] = plan.bounds[d];
    for (std::size_t i = 0; i < plan.count; ++i) {
      const double z = (static_cast<double>(perm[i]) + rng.uniform()) /
                       static_cast<double>(plan.count);
      points(i, d) = lo + z * (hi - lo);
    }
  }
  return points;
}

Matrix uniform_random(const SamplePlan& plan) {
  plan.validate();
  Rng rng(derive_seed(plan.seed, "uniform"));
  Matrix points(plan.count, plan.dimension);
  for (std::size_t i = 0; i < plan.count; ++i)
    for (std::size_t d = 0; d < plan.dimension; ++d)
      points(i, d) = rng.uniform(plan.bounds[d].first, plan.bounds[d].second);
  return points;
}

}  // namespace feasimap
