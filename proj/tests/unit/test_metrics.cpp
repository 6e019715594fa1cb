#include <doctest.h>

#include <cmath>
#include <map>
#include <vector>

#include "feasimap/errors.hpp"
#include "feasimap/metrics.hpp"
#include "feasimap/rng.hpp"

using namespace feasimap;

TEST_CASE("informedness arithmetic and degenerate classes") {
  CHECK(informedness({50, 0, 50, 0}) == doctest::Approx(1.0));
  CHECK(informedness({50, 50, 0, 0}) == doctest::Approx(0.0));  // everything called positive
  CHECK(informedness({40, 20, 30, 10}) == doctest::Approx(0.4).epsilon(1e-12));

  // No actual positives: perfect on negatives -> 1, otherwise undefined.
  CHECK(informedness({0, 0, 100, 0}) == doctest::Approx(1.0));
  CHECK(std::isnan(informedness({0, 5, 95, 0})));
  // No actual negatives, mirrored.
  CHECK(informedness({100, 0, 0, 0}) == doctest::Approx(1.0));
  CHECK(std::isnan(informedness({95, 0, 0, 5})));
  CHECK(std::isnan(informedness({0, 0, 0, 0})));

  // Swapping the positive/negative convention everywhere leaves it unchanged.
  const ConfusionMatrix cm{40, 20, 30, 10};
  const ConfusionMatrix swapped{cm.tn, cm.fn, cm.tp, cm.fp};
  CHECK(informedness(cm) == doctest::Approx(informedness(swapped)).epsilon(1e-12));
}

TEST_CASE("median and mad") {
  const std::vector<double> a{1, 2, 3};
  CHECK(median_mad(a).median == doctest::Approx(2.0));
  CHECK(median_mad(a).mad == doctest::Approx(1.0));
  const std::vector<double> single{5};
  CHECK(median_mad(single).median == doctest::Approx(5.0));
  CHECK(median_mad(single).mad == doctest::Approx(0.0));
  std::vector<double> range;
  for (int i = 0; i <= 20; ++i) range.push_back(i);
  CHECK(median_mad(range).median == doctest::Approx(10.0));
  CHECK(median_mad(range).mad == doctest::Approx(5.0));
  // Permutation invariance.
  std::vector<double> shuffled{13, 2, 20, 0, 7, 17, 4, 10, 1, 19, 3,
                               16, 5, 11, 18, 6, 12, 8, 15, 9, 14};
  CHECK(median_mad(shuffled).median == doctest::Approx(10.0));
  CHECK(median_mad(shuffled).mad == doctest::Approx(5.0));
  CHECK_THROWS_AS(median_mad(std::vector<double>{}), InputError);
}

TEST_CASE("wilcoxon signed-rank reference cases") {
  const std::vector<double> same{1.0, 2.0, 3.0};
  CHECK(wilcoxon_signed_rank_one_sided(same, same).p_value == doctest::Approx(1.0));

  const std::vector<double> a{1.0, 2.0, 3.0};
  const std::vector<double> zeros{0.0, 0.0, 0.0};
  // All three differences positive: only one of 2^3 sign assignments reaches
  // W+ = 6, so the exact p is 1/8.
  const TestResult res = wilcoxon_signed_rank_one_sided(a, zeros);
  CHECK(res.p_value == doctest::Approx(0.125).epsilon(1e-12));
  CHECK(res.statistic == doctest::Approx(6.0));
  CHECK(res.decision == TestDecision::fail_to_reject);

  CHECK_THROWS_AS(wilcoxon_signed_rank_one_sided(a, std::vector<double>{1.0}), InputError);
}

TEST_CASE("wilcoxon exact p matches brute-force sign enumeration") {
  // The exact branch counts subset sums with a DP over doubled ranks; check
  // it against the literal 2^m enumeration on small instances with ties.
  Rng rng(199);
  for (int trial = 0; trial < 20; ++trial) {
    const int m = 3 + static_cast<int>(rng.below(8));
    std::vector<double> a(m), b(m);
    for (int i = 0; i < m; ++i) {
      b[i] = rng.below(4);           // integer values force ties
      a[i] = b[i] + static_cast<double>(rng.below(5)) - 2.0;
    }
    std::vector<double> abs_d;
    std::vector<int> sign;
    for (int i = 0; i < m; ++i) {
      const double d = a[i] - b[i];
      if (d == 0.0) continue;
      abs_d.push_back(std::abs(d));
      sign.push_back(d > 0 ? 1 : -1);
    }
    const std::size_t k = abs_d.size();
    if (k == 0) continue;
    // average ranks
    std::vector<double> ranks(k);
    for (std::size_t i = 0; i < k; ++i) {
      double less = 0.0, equal = 0.0;
      for (std::size_t j = 0; j < k; ++j) {
        if (abs_d[j] < abs_d[i]) ++less;
        if (abs_d[j] == abs_d[i]) ++equal;
      }
      ranks[i] = less + 0.5 * (equal - 1.0) + 1.0;
    }
    double w_obs = 0.0;
    for (std::size_t i = 0; i < k; ++i)
      if (sign[i] > 0) w_obs += ranks[i];
    double count = 0.0;
    const std::size_t total = std::size_t{1} << k;
    for (std::size_t mask = 0; mask < total; ++mask) {
      double w = 0.0;
      for (std::size_t i = 0; i < k; ++i)
        if (mask & (std::size_t{1} << i)) w += ranks[i];
      if (w >= w_obs - 1e-9) count += 1.0;
    }
    const double p_brute = count / static_cast<double>(total);
    const double p_dp = wilcoxon_signed_rank_one_sided(a, b, 0.05, 1, TestBranch::exact).p_value;
    CHECK(p_dp == doctest::Approx(p_brute).epsilon(1e-12));
  }
}

TEST_CASE("wilcoxon branches agree near the decision boundary at n = 21") {
  Rng rng(211);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> a(21), b(21);
    for (int i = 0; i < 21; ++i) {
      b[i] = rng.uniform(0.0, 1.0);
      a[i] = b[i] + rng.uniform(-0.35, 0.55);  // mild positive shift
    }
    const double p_exact =
        wilcoxon_signed_rank_one_sided(a, b, 0.05, 1, TestBranch::exact).p_value;
    const double p_approx =
        wilcoxon_signed_rank_one_sided(a, b, 0.05, 1, TestBranch::approximate).p_value;
    CHECK(std::abs(p_exact - p_approx) <= 0.01);
  }
}

TEST_CASE("wilcoxon p is monotone under upward shifts of a") {
  Rng rng(223);
  std::vector<double> a(12), b(12);
  for (int i = 0; i < 12; ++i) {
    a[i] = rng.uniform(0.0, 1.0);
    b[i] = rng.uniform(0.0, 1.0);
  }
  double previous = 1.1;
  for (double shift = 0.0; shift <= 1.0; shift += 0.1) {
    std::vector<double> shifted = a;
    for (double& v : shifted) v += shift;
    const double p = wilcoxon_signed_rank_one_sided(shifted, b).p_value;
    CHECK(p <= previous + 1e-12);
    previous = p;
  }
}

TEST_CASE("mann-whitney reference cases") {
  const std::vector<double> a{3.0, 4.0};
  const std::vector<double> b{1.0, 2.0};
  const TestResult res = mann_whitney_u_one_sided(a, b);
  CHECK(res.p_value == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  CHECK(res.statistic == doctest::Approx(4.0));

  const std::vector<double> same{1.0, 2.0, 3.0};
  CHECK(mann_whitney_u_one_sided(same, same).p_value >= 0.5);
}

TEST_CASE("mann-whitney branches agree at 6 vs 6") {
  Rng rng(227);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> a(6), b(6);
    for (int i = 0; i < 6; ++i) {
      a[i] = rng.uniform(0.0, 1.0) + 0.3;
      b[i] = rng.uniform(0.0, 1.0);
    }
    const double p_exact = mann_whitney_u_one_sided(a, b, 0.05, 1, TestBranch::exact).p_value;
    const double p_approx =
        mann_whitney_u_one_sided(a, b, 0.05, 1, TestBranch::approximate).p_value;
    CHECK(std::abs(p_exact - p_approx) <= 0.02);
  }
}

TEST_CASE("mann-whitney p is monotone under upward shifts of a") {
  Rng rng(229);
  std::vector<double> a(8), b(10);
  for (auto& v : a) v = rng.uniform(0.0, 1.0);
  for (auto& v : b) v = rng.uniform(0.0, 1.0);
  double previous = 1.1;
  for (double shift = 0.0; shift <= 1.2; shift += 0.15) {
    std::vector<double> shifted = a;
    for (double& v : shifted) v += shift;
    const double p = mann_whitney_u_one_sided(shifted, b).p_value;
    CHECK(p <= previous + 1e-12);
    previous = p;
  }
}

TEST_CASE("best-and-equivalents selection") {
  // Two identical methods: both end up in best-or-equivalent.
  std::map<std::string, std::vector<double>> twins{
      {"m1", {0.9, 0.8, 0.95, 0.85, 0.9}}, {"m2", {0.9, 0.8, 0.95, 0.85, 0.9}}};
  const MethodComparison tw = best_and_equivalents(twins);
  CHECK(tw.equivalent.size() == 1);

  // A uniformly dominant method excludes the other at corrected alpha.
  std::map<std::string, std::vector<double>> dom;
  std::vector<double> good, bad;
  Rng rng(233);
  for (int i = 0; i < 21; ++i) {
    bad.push_back(rng.uniform(0.0, 0.2));
    good.push_back(0.8 + rng.uniform(0.0, 0.2));
  }
  dom["good"] = good;
  dom["bad"] = bad;
  const MethodComparison dc = best_and_equivalents(dom);
  CHECK(dc.best_method == "good");
  CHECK(dc.equivalent.empty());
  // 21 uniformly positive matched differences: approximate branch p is
  // essentially zero.
  CHECK(dc.p_values.at("bad") < 1e-4);

  // Bonferroni arithmetic for three methods.
  std::map<std::string, std::vector<double>> three{
      {"a", {0.5, 0.6, 0.7}}, {"b", {0.5, 0.6, 0.7}}, {"c", {0.4, 0.5, 0.6}}};
  CHECK(best_and_equivalents(three).corrected_alpha == doctest::Approx(0.025));

  // lhs-only comparisons run unmatched even with unequal rep counts.
  std::map<std::string, std::vector<double>> with_lhs{
      {"pbe", {0.9, 0.92, 0.91, 0.95}}, {"lhs-only", {0.5, 0.52, 0.48}}};
  const MethodComparison lc = best_and_equivalents(with_lhs);
  CHECK(lc.best_method == "pbe");

  // Matched comparison with unequal counts is a caller error.
  std::map<std::string, std::vector<double>> ragged{{"a", {0.1, 0.2}}, {"b", {0.1}}};
  CHECK_THROWS_AS(best_and_equivalents(ragged), InputError);
}
