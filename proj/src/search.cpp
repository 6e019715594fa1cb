#include "feasimap/search.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "feasimap/errors.hpp"
#include "feasimap/sampling.hpp"

namespace feasimap {

namespace {

constexpr double kDuplicateTolerance = 1e-8;
constexpr double kDuplicateNoise = 1e-6;

}  // namespace

std::string SearchConfig::method_name() const {
  return acquisition ? acquisition_name(*acquisition) : std::string("lhs-only");
}

std::uint64_t search_stream(std::uint64_t master_seed, const std::string& problem_id,
                            const std::string& purpose, int rep_index) {
  const std::uint64_t a = derive_seed(master_seed, problem_id);
  return derive_seed(a, purpose, static_cast<std::uint64_t>(rep_index));
}

std::vector<double> duplicate_guard(std::vector<double> candidate, const Matrix& existing,
                                    double tolerance, double noise_magnitude, Rng& rng) {
  const std::size_t n = candidate.size();
  auto too_close = [&](const std::vector<double>& x) {
    for (std::size_t i = 0; i < existing.rows(); ++i) {
      double dist = 0.0;
      for (std::size_t d = 0; d < n; ++d)
        dist = std::max(dist, std::abs(x[d] - existing(i, d)));
      if (dist <= tolerance) return true;
    }
    return false;
  };
  double magnitude = noise_magnitude;
  for (int attempt = 0; attempt < 64 && too_close(candidate); ++attempt) {
    for (std::size_t d = 0; d < n; ++d) {
      candidate[d] = std::clamp(candidate[d] + rng.uniform(-magnitude, magnitude), 0.0, 1.0);
    }
    if (attempt >= 8) magnitude *= 2.0;  // escape clusters of prior perturbations
  }
  return candidate;
}

namespace {

MultiSurrogate fit_all(const ProblemSpec& spec, const Matrix& xs,
                       const std::vector<std::vector<double>>& gs, const FitConfig& base,
                       std::uint64_t seed) {
  MultiSurrogate surr;
  surr.thresholds = spec.thresholds;
  for (std::size_t l = 0; l < spec.num_constraints; ++l) {
    Dataset data;
    data.inputs = xs;
    data.outputs.resize(xs.rows());
    for (std::size_t i = 0; i < xs.rows(); ++i) data.outputs[i] = gs[i][l];

    FitConfig config = base;
    config.input_bounds = spec.bounds;
    config.seed = derive_seed(seed, "constraint", l);
    try {
      surr.models.push_back(GpModel::fit(data, config));
    } catch (const NumericalError&) {
      // Retry once with a raised noise floor before declaring the run dead.
      config.noise_variance_lo = 1e-4;
      surr.models.push_back(GpModel::fit(data, config));
    }
  }
  return surr;
}

}  // namespace

SearchResult run_search(const SearchConfig& config, const SearchObserver& observer) {
  const ProblemSpec& spec = problem_by_id(config.problem_id);
  const std::size_t n = spec.dimension;
  const std::size_t budget = config.budget ? config.budget : 11 * n;
  // Default initial design of size n, but never below the 2 distinct points a
  // GP fit needs.
  std::size_t init = config.init_samples ? config.init_samples : std::max<std::size_t>(n, 2);
  if (!config.acquisition) init = budget;  // the baseline is all initialization
  if (init < 1) throw InputError("run_search: init_samples must be >= 1");
  if (budget < init) throw InputError("run_search: budget smaller than initial design");
  const long acq_evals = config.acq_max_evals ? config.acq_max_evals
                                              : 5000 * static_cast<long>(n);
  const std::string method = config.method_name();

  // The initial design is shared across model-based methods; the baseline
  // draws its own, larger design from a separate stream.
  const std::uint64_t init_seed =
      search_stream(config.master_seed, config.problem_id,
                    config.acquisition ? "init" : "lhs_baseline", config.rep_index);

  EvaluationLedger ledger(budget);
  RunTrace trace;

  Matrix xs = latin_hypercube({init, n, spec.bounds, init_seed});
  for (std::size_t i = 0; i < init; ++i) {
    std::vector<double> g = evaluate_constraints(spec, xs.row(i), ledger);
    TraceRow row;
    row.iteration = i;
    row.x.assign(xs.row(i).begin(), xs.row(i).end());
    row.g = std::move(g);
    row.acq_value = std::numeric_limits<double>::quiet_NaN();
    row.is_init = true;
    trace.rows.push_back(std::move(row));
  }

  std::vector<std::vector<double>> gs;
  for (const auto& g : ledger.responses()) gs.push_back(g);

  Matrix xn(budget, n);  // normalized evaluated inputs, grown as we go
  auto normalize_row = [&](std::span<const double> x, std::size_t row) {
    for (std::size_t d = 0; d < n; ++d)
      xn(row, d) = (x[d] - spec.bounds[d].first) / (spec.bounds[d].second - spec.bounds[d].first);
  };
  for (std::size_t i = 0; i < init; ++i) normalize_row(xs.row(i), i);

  while (ledger.calls() < budget) {
    const std::size_t m = ledger.calls();

    Matrix current(m, n);
    for (std::size_t i = 0; i < m; ++i)
      std::copy(ledger.inputs()[i].begin(), ledger.inputs()[i].end(), current.row(i).begin());

    const std::uint64_t fit_seed =
        search_stream(config.master_seed, config.problem_id, "fit/" + method,
                      config.rep_index);
    MultiSurrogate surr =
        fit_all(spec, current, gs, config.fit, derive_seed(fit_seed, "m", m));

    AcquisitionEvaluator evaluator(surr, *config.acquisition, config.acq_options);
    OptimizerConfig opt;
    opt.max_evals = acq_evals;
    opt.bounds = spec.bounds;
    opt.seed = derive_seed(
        search_stream(config.master_seed, config.problem_id, "acq/" + method, config.rep_index),
        "m", m);
    opt.initial_sigma = config.optimizer_initial_sigma;
    opt.restart = config.optimizer_restart;
    MaximizeResult res =
        maximize([&evaluator](std::span<const double> x) { return evaluator(x); }, opt);

    // Guard against re-sampling an already-evaluated point, in normalized
    // coordinates; then log the acquisition value at the point we will
    // actually evaluate, so traces can be replayed.
    std::vector<double> cand_norm(n);
    for (std::size_t d = 0; d < n; ++d)
      cand_norm[d] =
          (res.x_best[d] - spec.bounds[d].first) / (spec.bounds[d].second - spec.bounds[d].first);
    Matrix existing(m, n);
    for (std::size_t i = 0; i < m; ++i)
      std::copy(xn.row(i).begin(), xn.row(i).begin() + n, existing.row(i).begin());
    Rng guard_rng(derive_seed(
        search_stream(config.master_seed, config.problem_id, "guard/" + method, config.rep_index),
        "m", m));
    cand_norm = duplicate_guard(std::move(cand_norm), existing, kDuplicateTolerance,
                                kDuplicateNoise, guard_rng);

    std::vector<double> x_next(n);
    for (std::size_t d = 0; d < n; ++d) {
      const auto [lo, hi] = spec.bounds[d];
      x_next[d] = std::clamp(lo + cand_norm[d] * (hi - lo), lo, hi);
    }
    const double acq_value = evaluator(x_next);

    std::vector<double> g = evaluate_constraints(spec, x_next, ledger);
    gs.push_back(g);
    normalize_row(x_next, m);

    TraceRow row;
    row.iteration = m;
    row.x = x_next;
    row.g = std::move(g);
    row.acq_value = acq_value;
    row.is_init = false;
    trace.rows.push_back(std::move(row));

    if (observer) observer(m, surr, x_next, acq_value);
  }

  Matrix all(budget, n);
  for (std::size_t i = 0; i < budget; ++i)
    std::copy(ledger.inputs()[i].begin(), ledger.inputs()[i].end(), all.row(i).begin());
  const std::uint64_t final_seed =
      search_stream(config.master_seed, config.problem_id, "fit/" + method, config.rep_index);
  MultiSurrogate final_surr =
      fit_all(spec, all, gs, config.fit, derive_seed(final_seed, "m", budget));

  return {std::move(final_surr), std::move(trace)};
}

std::string trace_to_csv(const RunTrace& trace, std::size_t dimension,
                         std::size_t num_constraints) {
  std::string out = "iter";
  for (std::size_t d = 0; d < dimension; ++d) out += ",x_" + std::to_string(d);
  for (std::size_t l = 0; l < num_constraints; ++l) out += ",g_" + std::to_string(l);
  out += ",acq_value,phase\n";
  char buf[64];
  for (const auto& row : trace.rows) {
    out += std::to_string(row.iteration);
    for (double v : row.x) {
      std::snprintf(buf, sizeof buf, ",%.17g", v);
      out += buf;
    }
    for (double v : row.g) {
      std::snprintf(buf, sizeof buf, ",%.17g", v);
      out += buf;
    }
    if (std::isnan(row.acq_value)) {
      out += ",";
    } else {
      std::snprintf(buf, sizeof buf, ",%.17g", row.acq_value);
      out += buf;
    }
    out += row.is_init ? ",init\n" : ",seq\n";
  }
  return out;
}

RunTrace trace_from_csv(const std::string& text) {
  std::size_t dimension = 0, num_constraints = 0;
  RunTrace trace;
  std::size_t pos = 0;
  bool header = true;
  while (pos < text.size()) {
    const std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) break;
    const std::string line = text.substr(pos, end - pos);
    pos = end + 1;

    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      fields.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (header) {
      for (const auto& f : fields) {
        if (f.rfind("x_", 0) == 0) ++dimension;
        if (f.rfind("g_", 0) == 0) ++num_constraints;
      }
      if (fields.size() != dimension + num_constraints + 3)
        throw InputError("trace_from_csv: unrecognized header");
      header = false;
      continue;
    }
    if (fields.size() != dimension + num_constraints + 3)
      throw InputError("trace_from_csv: ragged row");
    TraceRow row;
    row.iteration = static_cast<std::size_t>(std::stoull(fields[0]));
    for (std::size_t d = 0; d < dimension; ++d) row.x.push_back(std::stod(fields[1 + d]));
    for (std::size_t l = 0; l < num_constraints; ++l)
      row.g.push_back(std::stod(fields[1 + dimension + l]));
    const std::string& acq = fields[1 + dimension + num_constraints];
    row.acq_value = acq.empty() ? std::numeric_limits<double>::quiet_NaN() : std::stod(acq);
    row.is_init = fields.back() == "init";
    trace.rows.push_back(std::move(row));
  }
  return trace;
}

}  // namespace feasimap
