#include "feasimap/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "feasimap/errors.hpp"
#include "feasimap/normal.hpp"

namespace feasimap {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

// 1-based ranks with ties sharing the average rank.
std::vector<double> average_ranks(const std::vector<double>& values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

double tie_correction_sum(const std::vector<double>& values) {
  std::vector<double> sorted(values);
  std::sort(sorted.begin(), sorted.end());
  double s = 0.0;
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i;
    while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i + 1);
    s += t * t * t - t;
    i = j + 1;
  }
  return s;
}

TestDecision decide(double p, double corrected_alpha) {
  return p <= corrected_alpha ? TestDecision::reject : TestDecision::fail_to_reject;
}

}  // namespace

double informedness(const ConfusionMatrix& cm) {
  const std::size_t pos = cm.tp + cm.fn;
  const std::size_t neg = cm.tn + cm.fp;
  if (pos == 0 && neg == 0) return kNan;
  if (pos == 0) return cm.fp == 0 ? 1.0 : kNan;
  if (neg == 0) return cm.fn == 0 ? 1.0 : kNan;
  const double tpr = static_cast<double>(cm.tp) / static_cast<double>(pos);
  const double tnr = static_cast<double>(cm.tn) / static_cast<double>(neg);
  return tpr + tnr - 1.0;
}

MedianMad median_mad(std::span<const double> values) {
  if (values.empty()) throw InputError("median_mad: empty input");
  std::vector<double> v(values.begin(), values.end());
  auto med = [](std::vector<double>& w) {
    std::sort(w.begin(), w.end());
    const std::size_t n = w.size();
    return n % 2 ? w[n / 2] : 0.5 * (w[n / 2 - 1] + w[n / 2]);
  };
  const double m = med(v);
  std::vector<double> dev(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) dev[i] = std::abs(v[i] - m);
  return {m, med(dev)};
}

TestResult wilcoxon_signed_rank_one_sided(std::span<const double> a, std::span<const double> b,
                                          double alpha, int comparisons, TestBranch branch) {
  if (a.size() != b.size())
    throw InputError("wilcoxon_signed_rank_one_sided: unmatched sample sizes");
  if (comparisons < 1) throw InputError("wilcoxon_signed_rank_one_sided: comparisons < 1");
  const double corrected = alpha / comparisons;

  std::vector<double> abs_diffs;
  std::vector<int> signs;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    if (d == 0.0) continue;  // zeros dropped before ranking
    abs_diffs.push_back(std::abs(d));
    signs.push_back(d > 0.0 ? 1 : -1);
  }
  const std::size_t m = abs_diffs.size();
  if (m == 0) return {0.0, 1.0, corrected, TestDecision::fail_to_reject};

  const std::vector<double> ranks = average_ranks(abs_diffs);
  double w_plus = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    if (signs[i] > 0) w_plus += ranks[i];

  const bool exact = branch == TestBranch::exact ||
                     (branch == TestBranch::automatic && m <= 20);
  double p;
  if (exact) {
    if (m > 25) throw InputError("wilcoxon exact branch: too many non-zero differences");
    // Distribution of W+ over all 2^m sign assignments by subset-sum counting
    // on doubled ranks (integers even under ties).
    std::vector<long> scaled(m);
    long total = 0;
    for (std::size_t i = 0; i < m; ++i) {
      scaled[i] = std::lround(2.0 * ranks[i]);
      total += scaled[i];
    }
    std::vector<double> ways(total + 1, 0.0);
    ways[0] = 1.0;
    long filled = 0;
    for (std::size_t i = 0; i < m; ++i) {
      filled += scaled[i];
      for (long s = filled; s >= scaled[i]; --s) ways[s] += ways[s - scaled[i]];
    }
    const long threshold = static_cast<long>(std::ceil(2.0 * w_plus - 1e-9));
    double count = 0.0;
    for (long s = std::max(threshold, 0L); s <= total; ++s) count += ways[s];
    p = count / std::pow(2.0, static_cast<double>(m));
  } else {
    const double md = static_cast<double>(m);
    const double mean = md * (md + 1.0) / 4.0;
    const double var =
        md * (md + 1.0) * (2.0 * md + 1.0) / 24.0 - tie_correction_sum(abs_diffs) / 48.0;
    if (var <= 0.0) return {w_plus, 1.0, corrected, TestDecision::fail_to_reject};
    const double z = (w_plus - 0.5 - mean) / std::sqrt(var);
    p = norm_cdf(-z);
  }
  return {w_plus, p, corrected, decide(p, corrected)};
}

TestResult mann_whitney_u_one_sided(std::span<const double> a, std::span<const double> b,
                                    double alpha, int comparisons, TestBranch branch) {
  if (a.empty() || b.empty()) throw InputError("mann_whitney_u_one_sided: empty sample");
  if (comparisons < 1) throw InputError("mann_whitney_u_one_sided: comparisons < 1");
  const double corrected = alpha / comparisons;
  const std::size_t na = a.size(), nb = b.size(), n = na + nb;

  auto u_statistic = [](std::span<const double> xs, std::span<const double> ys) {
    double u = 0.0;
    for (double x : xs)
      for (double y : ys) {
        if (x > y) u += 1.0;
        else if (x == y) u += 0.5;
      }
    return u;
  };
  const double u_obs = u_statistic(a, b);

  const bool exact = branch == TestBranch::exact ||
                     (branch == TestBranch::automatic && n <= 12);
  double p;
  if (exact) {
    if (n > 16) throw InputError("mann-whitney exact branch: samples too large");
    std::vector<double> combined(a.begin(), a.end());
    combined.insert(combined.end(), b.begin(), b.end());
    // Enumerate every assignment of `na` of the n values to the first group.
    std::vector<std::size_t> pick(na);
    for (std::size_t i = 0; i < na; ++i) pick[i] = i;
    double count = 0.0, arrangements = 0.0;
    while (true) {
      std::vector<double> ga, gb;
      std::vector<bool> in_a(n, false);
      for (std::size_t i : pick) in_a[i] = true;
      for (std::size_t i = 0; i < n; ++i) (in_a[i] ? ga : gb).push_back(combined[i]);
      if (u_statistic(ga, gb) >= u_obs - 1e-9) count += 1.0;
      arrangements += 1.0;

      // next combination
      std::size_t i = na;
      while (i > 0 && pick[i - 1] == n - na + i - 1) --i;
      if (i == 0) break;
      ++pick[i - 1];
      for (std::size_t j = i; j < na; ++j) pick[j] = pick[j - 1] + 1;
    }
    p = count / arrangements;
  } else {
    std::vector<double> combined(a.begin(), a.end());
    combined.insert(combined.end(), b.begin(), b.end());
    const double nad = static_cast<double>(na), nbd = static_cast<double>(nb),
                 nd = static_cast<double>(n);
    const double mean = nad * nbd / 2.0;
    const double var =
        nad * nbd / 12.0 * ((nd + 1.0) - tie_correction_sum(combined) / (nd * (nd - 1.0)));
    if (var <= 0.0) return {u_obs, 1.0, corrected, TestDecision::fail_to_reject};
    const double z = (u_obs - 0.5 - mean) / std::sqrt(var);
    p = norm_cdf(-z);
  }
  return {u_obs, p, corrected, decide(p, corrected)};
}

MethodComparison best_and_equivalents(const std::map<std::string, std::vector<double>>& values,
                                      double alpha, const std::string& unmatched_method) {
  if (values.size() < 2) throw InputError("best_and_equivalents: need at least 2 methods");

  MethodComparison out;
  double best_median = -std::numeric_limits<double>::infinity();
  for (const auto& [method, vals] : values) {
    std::vector<double> clean;
    for (double v : vals)
      if (!std::isnan(v)) clean.push_back(v);
    if (clean.empty()) continue;
    const double med = median_mad(clean).median;
    if (med > best_median) {
      best_median = med;
      out.best_method = method;
    }
  }
  if (out.best_method.empty()) throw InputError("best_and_equivalents: all values undefined");

  const int comparisons = static_cast<int>(values.size()) - 1;
  out.corrected_alpha = alpha / comparisons;
  const std::vector<double>& best_vals = values.at(out.best_method);

  for (const auto& [method, vals] : values) {
    if (method == out.best_method) continue;
    const bool any_defined = std::any_of(vals.begin(), vals.end(),
                                         [](double v) { return !std::isnan(v); });
    if (!any_defined) {
      // Nothing to compare: unknown, not equivalent.
      out.p_values[method] = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    TestResult res;
    if (method == unmatched_method || out.best_method == unmatched_method) {
      std::vector<double> xa, xb;
      for (double v : best_vals)
        if (!std::isnan(v)) xa.push_back(v);
      for (double v : vals)
        if (!std::isnan(v)) xb.push_back(v);
      res = mann_whitney_u_one_sided(xa, xb, alpha, comparisons);
    } else {
      if (vals.size() != best_vals.size())
        throw InputError("best_and_equivalents: unmatched rep counts for a matched comparison");
      std::vector<double> xa, xb;
      for (std::size_t i = 0; i < vals.size(); ++i) {
        if (std::isnan(best_vals[i]) || std::isnan(vals[i])) continue;  // pairwise deletion
        xa.push_back(best_vals[i]);
        xb.push_back(vals[i]);
      }
      res = wilcoxon_signed_rank_one_sided(xa, xb, alpha, comparisons);
    }
    out.p_values[method] = res.p_value;
    if (res.decision == TestDecision::fail_to_reject) out.equivalent.push_back(method);
  }
  return out;
}

}  // namespace feasimap
