#include "feasimap/cmaes.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>

#include "feasimap/errors.hpp"
#include "feasimap/linalg.hpp"
#include "feasimap/rng.hpp"

namespace feasimap {

namespace {

struct Incumbent {
  std::vector<double> x;
  double f = -std::numeric_limits<double>::infinity();
  long evals = 0;
};

// Evaluates in unit-cube coordinates, mapping to the real box first.
struct BoxObjective {
  const Objective& f;
  std::span<const std::pair<double, double>> bounds;
  Incumbent& best;
  long max_evals;
  std::vector<double> scratch;

  bool exhausted() const { return best.evals >= max_evals; }

  double operator()(std::span<const double> u) {
    scratch.resize(bounds.size());
    for (std::size_t d = 0; d < bounds.size(); ++d)
      scratch[d] = bounds[d].first + u[d] * (bounds[d].second - bounds[d].first);
    const double v = f(scratch);
    ++best.evals;
    if (v > best.f) {
      best.f = v;
      best.x = scratch;
    }
    return v;
  }
};

// One CMA-ES run in the unit cube. Returns when the budget is exhausted or an
// internal stop triggers.
void cma_run(BoxObjective& objective, std::size_t n, int lambda, double sigma0,
             std::span<const double> mean0, Rng& rng) {
  const int mu = std::max(1, lambda / 2);
  std::vector<double> weights(mu);
  for (int i = 0; i < mu; ++i)
    weights[i] = std::log((lambda + 1) / 2.0) - std::log(static_cast<double>(i + 1));
  const double wsum = std::accumulate(weights.begin(), weights.end(), 0.0);
  for (double& w : weights) w /= wsum;
  double mu_eff = 0.0;
  for (double w : weights) mu_eff += w * w;
  mu_eff = 1.0 / mu_eff;

  const double nd = static_cast<double>(n);
  const double c_sigma = (mu_eff + 2.0) / (nd + mu_eff + 5.0);
  const double d_sigma =
      1.0 + 2.0 * std::max(0.0, std::sqrt((mu_eff - 1.0) / (nd + 1.0)) - 1.0) + c_sigma;
  const double c_c = (4.0 + mu_eff / nd) / (nd + 4.0 + 2.0 * mu_eff / nd);
  const double c_1 = 2.0 / ((nd + 1.3) * (nd + 1.3) + mu_eff);
  const double c_mu = std::min(1.0 - c_1, 2.0 * (mu_eff - 2.0 + 1.0 / mu_eff) /
                                              ((nd + 2.0) * (nd + 2.0) + mu_eff));
  const double chi_n = std::sqrt(nd) * (1.0 - 1.0 / (4.0 * nd) + 1.0 / (21.0 * nd * nd));

  std::vector<double> mean(mean0.begin(), mean0.end());
  double sigma = sigma0;
  Matrix c(n, n);
  for (std::size_t i = 0; i < n; ++i) c(i, i) = 1.0;
  std::vector<double> p_sigma(n, 0.0), p_c(n, 0.0);

  Matrix b;
  std::vector<double> d_scale;

  std::vector<std::vector<double>> xs(lambda), ys(lambda);
  std::vector<double> fs(lambda);
  std::vector<int> order(lambda);

  const int hist_len = 10 + static_cast<int>(std::ceil(30.0 * nd / lambda));
  std::deque<double> best_history;
  const long max_gens = 300 + static_cast<long>(120.0 * nd * nd / lambda);
  long gen = 0;

  while (!objective.exhausted() && gen < max_gens) {
    ++gen;

    symmetric_eigen(c, b, d_scale);
    double d_min = std::numeric_limits<double>::infinity(), d_max = 0.0;
    for (double& ev : d_scale) {
      ev = std::sqrt(std::max(ev, 1e-30));
      d_min = std::min(d_min, ev);
      d_max = std::max(d_max, ev);
    }
    if (d_max / d_min > 1e7) break;  // condition blow-up (ratio of axis lengths)

    int evaluated = 0;
    for (int i = 0; i < lambda && !objective.exhausted(); ++i) {
      xs[i].resize(n);
      ys[i].resize(n);
      std::vector<double> z(n);
      bool in_bounds = false;
      for (int attempt = 0; attempt < 10 && !in_bounds; ++attempt) {
        for (std::size_t k = 0; k < n; ++k) z[k] = rng.normal();
        for (std::size_t r = 0; r < n; ++r) {
          double acc = 0.0;
          for (std::size_t k = 0; k < n; ++k) acc += b(r, k) * d_scale[k] * z[k];
          ys[i][r] = acc;
          xs[i][r] = mean[r] + sigma * acc;
        }
        in_bounds = std::all_of(xs[i].begin(), xs[i].end(),
                                [](double v) { return v >= 0.0 && v <= 1.0; });
      }
      if (!in_bounds) {
        for (std::size_t r = 0; r < n; ++r) {
          xs[i][r] = std::clamp(xs[i][r], 0.0, 1.0);
          ys[i][r] = (xs[i][r] - mean[r]) / sigma;
        }
      }
      fs[i] = objective(xs[i]);
      ++evaluated;
    }
    if (evaluated < lambda) break;  // budget ran dry mid-generation

    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int bb) { return fs[a] > fs[bb]; });

    best_history.push_back(fs[order[0]]);
    if (static_cast<int>(best_history.size()) > hist_len) best_history.pop_front();
    if (static_cast<int>(best_history.size()) == hist_len) {
      const auto [lo, hi] = std::minmax_element(best_history.begin(), best_history.end());
      if (*hi - *lo < 1e-12) break;
    }

    std::vector<double> mean_new(n, 0.0), y_w(n, 0.0);
    for (int i = 0; i < mu; ++i) {
      const int idx = order[i];
      for (std::size_t r = 0; r < n; ++r) {
        mean_new[r] += weights[i] * xs[idx][r];
        y_w[r] += weights[i] * ys[idx][r];
      }
    }

    // p_sigma update needs C^{-1/2} y_w = B D^{-1} B^T y_w.
    std::vector<double> tmp(n, 0.0), c_inv_half_yw(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      double acc = 0.0;
      for (std::size_t r = 0; r < n; ++r) acc += b(r, k) * y_w[r];
      tmp[k] = acc / d_scale[k];
    }
    for (std::size_t r = 0; r < n; ++r) {
      double acc = 0.0;
      for (std::size_t k = 0; k < n; ++k) acc += b(r, k) * tmp[k];
      c_inv_half_yw[r] = acc;
    }

    double p_sigma_norm2 = 0.0;
    const double cs_fac = std::sqrt(c_sigma * (2.0 - c_sigma) * mu_eff);
    for (std::size_t r = 0; r < n; ++r) {
      p_sigma[r] = (1.0 - c_sigma) * p_sigma[r] + cs_fac * c_inv_half_yw[r];
      p_sigma_norm2 += p_sigma[r] * p_sigma[r];
    }
    const double p_sigma_norm = std::sqrt(p_sigma_norm2);

    const double denom =
        std::sqrt(1.0 - std::pow(1.0 - c_sigma, 2.0 * static_cast<double>(gen)));
    const bool h_sigma = p_sigma_norm / denom < (1.4 + 2.0 / (nd + 1.0)) * chi_n;

    const double cc_fac = std::sqrt(c_c * (2.0 - c_c) * mu_eff);
    for (std::size_t r = 0; r < n; ++r)
      p_c[r] = (1.0 - c_c) * p_c[r] + (h_sigma ? cc_fac * y_w[r] : 0.0);

    const double c1a = c_1 * (1.0 - (h_sigma ? 0.0 : 1.0) * c_c * (2.0 - c_c));
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t s = 0; s < n; ++s) {
        double rank_mu = 0.0;
        for (int i = 0; i < mu; ++i) {
          const int idx = order[i];
          rank_mu += weights[i] * ys[idx][r] * ys[idx][s];
        }
        c(r, s) = (1.0 - c1a - c_mu) * c(r, s) + c_1 * p_c[r] * p_c[s] + c_mu * rank_mu;
      }
    }

    sigma *= std::exp((c_sigma / d_sigma) * (p_sigma_norm / chi_n - 1.0));
    sigma = std::min(sigma, 1e4);
    mean = std::move(mean_new);

    double step = 0.0;
    for (std::size_t r = 0; r < n; ++r)
      step = std::max(step, sigma * std::sqrt(std::max(c(r, r), 0.0)));
    if (step < 1e-13) break;
  }
}

}  // namespace

MaximizeResult maximize(const Objective& f, const OptimizerConfig& config) {
  const std::size_t n = config.bounds.size();
  if (n == 0) throw InputError("maximize: empty bounds");
  for (const auto& [lo, hi] : config.bounds)
    if (!(lo < hi)) throw InputError("maximize: zero-volume box");
  if (config.max_evals <= 0) throw InputError("maximize: max_evals must be positive");

  Rng rng(derive_seed(config.seed, "cmaes"));
  Incumbent best;
  BoxObjective objective{f, config.bounds, best, config.max_evals, {}};

  const int lambda_def =
      4 + static_cast<int>(std::floor(3.0 * std::log(static_cast<double>(n))));

  long evals_large = 0, evals_small = 0;
  int n_large = 0;
  int restarts = 0;
  int lambda_large = lambda_def;

  while (!objective.exhausted() && restarts <= config.restart.max_restarts) {
    int lambda = lambda_def;
    double sigma0 = config.initial_sigma;
    bool is_large = true;

    if (restarts > 0) {
      is_large = evals_large <= evals_small;
      if (is_large) {
        ++n_large;
        lambda = static_cast<int>(lambda_def *
                                  std::pow(config.restart.population_growth, n_large));
        lambda_large = lambda;
      } else {
        const double u1 = rng.uniform();
        const double u2 = rng.uniform();
        const double frac = 0.5 * static_cast<double>(lambda_large) / lambda_def;
        lambda = std::max(2, static_cast<int>(lambda_def * std::pow(frac, u1 * u1)));
        sigma0 = config.initial_sigma * std::pow(10.0, -2.0 * u2);
      }
    }

    std::vector<double> mean0(n);
    for (std::size_t d = 0; d < n; ++d) mean0[d] = rng.uniform();

    const long before = best.evals;
    cma_run(objective, n, lambda, sigma0, mean0, rng);
    const long used = best.evals - before;
    (is_large ? evals_large : evals_small) += used;
    ++restarts;
  }

  if (best.x.empty()) {  // budget smaller than a single sample; evaluate the center
    std::vector<double> center(n, 0.5);
    objective(center);
  }
  return {best.x, best.f, best.evals};
}

}  // namespace feasimap
