#include "feasimap/problems.hpp"

#include <algorithm>
#include <cmath>

#include "feasimap/errors.hpp"
#include "feasimap/rng.hpp"
#include "feasimap/sampling.hpp"

namespace feasimap {

namespace {

// Inequality constraints in g(x) <= 0 form, from the CEC2006 definitions.

void g4_constraints(const double* x, double* g) {
  const double x1 = x[0], x2 = x[1], x3 = x[2], x4 = x[3], x5 = x[4];
  const double u = 85.334407 + 0.0056858 * x2 * x5 + 0.0006262 * x1 * x4 - 0.0022053 * x3 * x5;
  const double v = 80.51249 + 0.0071317 * x2 * x5 + 0.0029955 * x1 * x2 + 0.0021813 * x3 * x3;
  const double w = 9.300961 + 0.0047026 * x3 * x5 + 0.0012547 * x1 * x3 + 0.0019085 * x3 * x4;
  g[0] = u - 92.0;
  g[1] = -u;
  g[2] = v - 110.0;
  g[3] = -v + 90.0;
  g[4] = w - 25.0;
  g[5] = -w + 20.0;
}

void g8_constraints(const double* x, double* g) {
  const double x1 = x[0], x2 = x[1];
  g[0] = x1 * x1 - x2 + 1.0;
  g[1] = 1.0 - x1 + (x2 - 4.0) * (x2 - 4.0);
}

void g9_constraints(const double* x, double* g) {
  const double x1 = x[0], x2 = x[1], x3 = x[2], x4 = x[3], x5 = x[4], x6 = x[5], x7 = x[6];
  g[0] = -127.0 + 2.0 * x1 * x1 + 3.0 * std::pow(x2, 4) + x3 + 4.0 * x4 * x4 + 5.0 * x5;
  g[1] = -282.0 + 7.0 * x1 + 3.0 * x2 + 10.0 * x3 * x3 + x4 - x5;
  g[2] = -196.0 + 23.0 * x1 + x2 * x2 + 6.0 * x6 * x6 - 8.0 * x7;
  g[3] = 4.0 * x1 * x1 + x2 * x2 - 3.0 * x1 * x2 + 2.0 * x3 * x3 + 5.0 * x6 - 11.0 * x7;
}

void g19_constraints(const double* x, double* g) {
  static const double a[10][5] = {
      {-16.0, 2.0, 0.0, 1.0, 0.0},   {0.0, -2.0, 0.0, 0.4, 2.0},
      {-3.5, 0.0, 2.0, 0.0, 0.0},    {0.0, -2.0, 0.0, -4.0, -1.0},
      {0.0, -9.0, -2.0, 1.0, -2.8},  {2.0, 0.0, -4.0, 0.0, 0.0},
      {-1.0, -1.0, -1.0, -1.0, -1.0}, {-1.0, -2.0, -3.0, -2.0, -1.0},
      {1.0, 2.0, 3.0, 4.0, 5.0},     {1.0, 1.0, 1.0, 1.0, 1.0}};
  static const double c[5][5] = {{30.0, -20.0, -10.0, 32.0, -10.0},
                                 {-20.0, 39.0, -6.0, -31.0, 32.0},
                                 {-10.0, -6.0, 10.0, -6.0, -10.0},
                                 {32.0, -31.0, -6.0, 39.0, -20.0},
                                 {-10.0, 32.0, -10.0, -20.0, 30.0}};
  static const double d[5] = {4.0, 8.0, 10.0, 6.0, 2.0};
  static const double e[5] = {-15.0, -27.0, -36.0, -18.0, -12.0};

  for (int j = 0; j < 5; ++j) {
    double s = -3.0 * d[j] * x[10 + j] * x[10 + j] - e[j];
    for (int i = 0; i < 5; ++i) s -= 2.0 * c[i][j] * x[10 + i];
    for (int i = 0; i < 10; ++i) s += a[i][j] * x[i];
    g[j] = s;
  }
}

void g24_constraints(const double* x, double* g) {
  const double x1 = x[0], x2 = x[1];
  const double x1_2 = x1 * x1;
  const double x1_3 = x1_2 * x1;
  const double x1_4 = x1_2 * x1_2;
  g[0] = -2.0 * x1_4 + 8.0 * x1_3 - 8.0 * x1_2 + x2 - 2.0;
  g[1] = -4.0 * x1_4 + 32.0 * x1_3 - 88.0 * x1_2 + 96.0 * x1 + x2 - 36.0;
}

void demo1d_constraints(const double* x, double* g) {
  g[0] = std::sin(x[0]);
  g[1] = 2.0 * std::sin(x[0] - 1.0);
}

const double kTwoPi = 6.28318530717958647692;

const ProblemSpec kProblems[] = {
    {"g4",
     5,
     {{78.0, 102.0}, {33.0, 45.0}, {27.0, 45.0}, {27.0, 45.0}, {27.0, 45.0}},
     6,
     {0.0, 0.0, 0.0, 0.0, 0.0, 0.0},
     26.9953,
     g4_constraints},
    {"g8", 2, {{0.0, 10.0}, {0.0, 10.0}}, 2, {0.0, 0.0}, 0.8727, g8_constraints},
    {"g9",
     7,
     {{-10.0, 10.0}, {-10.0, 10.0}, {-10.0, 10.0}, {-10.0, 10.0}, {-10.0, 10.0},
      {-10.0, 10.0}, {-10.0, 10.0}},
     4,
     {0.0, 0.0, 0.0, 0.0},
     0.5218,
     g9_constraints},
    {"g19",
     15,
     {{0.0, 10.0}, {0.0, 10.0}, {0.0, 10.0}, {0.0, 10.0}, {0.0, 10.0},
      {0.0, 10.0}, {0.0, 10.0}, {0.0, 10.0}, {0.0, 10.0}, {0.0, 10.0},
      {0.0, 10.0}, {0.0, 10.0}, {0.0, 10.0}, {0.0, 10.0}, {0.0, 10.0}},
     5,
     {0.0, 0.0, 0.0, 0.0, 0.0},
     33.4856,
     g19_constraints},
    {"g24", 2, {{0.0, 3.0}, {0.0, 4.0}}, 2, {0.0, 0.0}, 44.2294, g24_constraints},
    {"demo1d", 1, {{0.0, kTwoPi}}, 2, {0.05, 1.5}, 48.3780, demo1d_constraints},
};

}  // namespace

const ProblemSpec& problem_by_id(const std::string& id) {
  for (const auto& p : kProblems)
    if (p.id == id) return p;
  throw InputError("unknown problem id: " + id);
}

std::vector<std::string> problem_ids() {
  std::vector<std::string> ids;
  for (const auto& p : kProblems) ids.push_back(p.id);
  return ids;
}

void EvaluationLedger::record(std::vector<double> x, std::vector<double> g) {
  if (capped_ && xs_.size() >= cap_)
    throw BudgetError("EvaluationLedger: expensive evaluation budget exceeded");
  xs_.push_back(std::move(x));
  gs_.push_back(std::move(g));
}

std::vector<double> evaluate_constraints(const ProblemSpec& spec, std::span<const double> x,
                                         EvaluationLedger& ledger) {
  if (x.size() != spec.dimension) throw InputError("evaluate_constraints: dimension mismatch");
  for (std::size_t d = 0; d < spec.dimension; ++d)
    if (!(x[d] >= spec.bounds[d].first && x[d] <= spec.bounds[d].second))
      throw InputError("evaluate_constraints: point out of bounds for " + spec.id);
  std::vector<double> g(spec.num_constraints);
  spec.constraints(x.data(), g.data());
  ledger.record(std::vector<double>(x.begin(), x.end()), g);
  return g;
}

bool true_feasible(const ProblemSpec& spec, std::span<const double> x) {
  if (x.size() != spec.dimension) throw InputError("true_feasible: dimension mismatch");
  for (std::size_t d = 0; d < spec.dimension; ++d)
    if (!(x[d] >= spec.bounds[d].first && x[d] <= spec.bounds[d].second))
      throw InputError("true_feasible: point out of bounds for " + spec.id);
  double g[16];
  spec.constraints(x.data(), g);
  for (std::size_t l = 0; l < spec.num_constraints; ++l)
    if (!(g[l] <= spec.thresholds[l])) return false;
  return true;
}

double monte_carlo_rho(const ProblemSpec& spec, std::size_t samples, std::uint64_t seed) {
  if (samples < 10000) throw InputError("monte_carlo_rho: need at least 1e4 samples");
  constexpr std::size_t kChunk = 16384;
  std::size_t feasible = 0;
  std::size_t done = 0;
  std::size_t chunk_index = 0;
  while (done < samples) {
    const std::size_t count = std::min(kChunk, samples - done);
    SamplePlan plan{count, spec.dimension, spec.bounds, derive_seed(seed, "rho", chunk_index)};
    const Matrix points = uniform_random(plan);
    for (std::size_t i = 0; i < count; ++i)
      if (true_feasible(spec, points.row(i))) ++feasible;
    done += count;
    ++chunk_index;
  }
  return 100.0 * static_cast<double>(feasible) / static_cast<double>(samples);
}

}  // namespace feasimap
