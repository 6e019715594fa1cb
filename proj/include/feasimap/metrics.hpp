#pragma once

// Classifier scoring and the nonparametric tests used to compare methods:
// bookmaker informedness, median/MAD summaries, one-sided Wilcoxon
// signed-rank (matched) and Mann-Whitney U (unmatched), both with exact
// small-sample branches, and the best-plus-equivalents selection with
// Bonferroni correction.

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace feasimap {

struct ConfusionMatrix {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  std::size_t total() const { return tp + fp + tn + fn; }
};

/// TPR + TNR - 1 in [-1, 1]. When a class is absent from the ground truth:
/// 1.0 if the present class is perfectly classified, NaN otherwise.
double informedness(const ConfusionMatrix& cm);

struct MedianMad {
  double median = 0.0;
  double mad = 0.0;  // median absolute deviation, unscaled
};

MedianMad median_mad(std::span<const double> values);

enum class TestDecision { reject, fail_to_reject };
enum class TestBranch { automatic, exact, approximate };

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  double corrected_alpha = 0.05;
  TestDecision decision = TestDecision::fail_to_reject;
};

/// One-sided Wilcoxon signed-rank on matched pairs, H1: a > b. Zero
/// differences are dropped; ties share average ranks. Exact sign-assignment
/// enumeration up to 20 non-zero differences, normal approximation with
/// continuity and tie corrections beyond.
TestResult wilcoxon_signed_rank_one_sided(std::span<const double> a, std::span<const double> b,
                                          double alpha = 0.05, int comparisons = 1,
                                          TestBranch branch = TestBranch::automatic);

/// One-sided Mann-Whitney U, H1: a > b. Exact permutation enumeration while
/// |a| + |b| <= 12, normal approximation with tie correction beyond.
TestResult mann_whitney_u_one_sided(std::span<const double> a, std::span<const double> b,
                                    double alpha = 0.05, int comparisons = 1,
                                    TestBranch branch = TestBranch::automatic);

struct MethodComparison {
  std::string best_method;
  std::vector<std::string> equivalent;           // methods not distinguishable from best
  std::map<std::string, double> p_values;        // vs best; best itself absent
  double corrected_alpha = 0.05;
};

/// Pick the best median and test every other method against it one-sided at
/// alpha / (#methods - 1). Comparisons involving `unmatched_method` use
/// Mann-Whitney; all others use the matched Wilcoxon test. NaN entries are
/// dropped (pairwise for matched comparisons).
MethodComparison best_and_equivalents(const std::map<std::string, std::vector<double>>& values,
                                      double alpha = 0.05,
                                      const std::string& unmatched_method = "lhs-only");

}  // namespace feasimap
