#include <doctest.h>

#include <cmath>
#include <vector>

#include "feasimap/errors.hpp"
#include "feasimap/problems.hpp"
#include "feasimap/sampling.hpp"

using namespace feasimap;

TEST_CASE("registry exposes the suite with the right shapes") {
  CHECK(problem_ids() ==
        std::vector<std::string>{"g4", "g8", "g9", "g19", "g24", "demo1d"});
  CHECK(problem_by_id("g4").dimension == 5);
  CHECK(problem_by_id("g4").num_constraints == 6);
  CHECK(problem_by_id("g8").dimension == 2);
  CHECK(problem_by_id("g8").num_constraints == 2);
  CHECK(problem_by_id("g9").dimension == 7);
  CHECK(problem_by_id("g9").num_constraints == 4);
  CHECK(problem_by_id("g19").dimension == 15);
  CHECK(problem_by_id("g19").num_constraints == 5);
  CHECK(problem_by_id("g24").dimension == 2);
  CHECK(problem_by_id("g24").num_constraints == 2);
  CHECK_THROWS_AS(problem_by_id("g1"), InputError);
}

TEST_CASE("demo constraints evaluate the two sines") {
  const ProblemSpec& demo = problem_by_id("demo1d");
  EvaluationLedger ledger;
  const std::vector<double> g0 = evaluate_constraints(demo, std::vector<double>{0.0}, ledger);
  CHECK(g0[0] == doctest::Approx(0.0));
  CHECK(g0[1] == doctest::Approx(-1.68294).epsilon(1e-5));
  CHECK(demo.thresholds == std::vector<double>{0.05, 1.5});
}

TEST_CASE("true_feasible is the all-constraints intersection with inclusive thresholds") {
  const ProblemSpec& demo = problem_by_id("demo1d");
  // sin x = 0.05 exactly on the boundary: feasible for g1.
  const double x_boundary = std::asin(0.05);
  EvaluationLedger ledger;
  const auto g = evaluate_constraints(demo, std::vector<double>{x_boundary}, ledger);
  CHECK(g[0] == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(g[1] < 1.5);
  CHECK(true_feasible(demo, std::vector<double>{x_boundary}));
  // Violating exactly one constraint is infeasible: sin x maximal at pi/2.
  CHECK_FALSE(true_feasible(demo, std::vector<double>{1.5707963267948966}));
}

TEST_CASE("monte carlo volume agrees with the references at test scale") {
  // 1e5 samples: binomial noise ~3 sigma tolerances around the references.
  struct Case {
    const char* id;
    double tol;
  };
  for (const Case c : {Case{"g8", 0.10}, Case{"g24", 0.50}, Case{"demo1d", 0.50}}) {
    const ProblemSpec& spec = problem_by_id(c.id);
    const double rho = monte_carlo_rho(spec, 100000, 7);
    CHECK(std::abs(rho - spec.reference_rho) < c.tol);
  }
  CHECK_THROWS_AS(monte_carlo_rho(problem_by_id("g8"), 100, 7), InputError);
}

TEST_CASE("the labeling routine and the volume estimate are the same code path") {
  const ProblemSpec& spec = problem_by_id("g24");
  SamplePlan plan{2000, spec.dimension, spec.bounds, 99};
  const Matrix pts = uniform_random(plan);
  std::size_t feasible = 0;
  EvaluationLedger ledger;
  for (std::size_t i = 0; i < pts.rows(); ++i) {
    const auto g = evaluate_constraints(spec, pts.row(i), ledger);
    bool ok = true;
    for (std::size_t l = 0; l < g.size(); ++l)
      if (!(g[l] <= spec.thresholds[l])) ok = false;
    CHECK(ok == true_feasible(spec, pts.row(i)));
    if (ok) ++feasible;
  }
  CHECK(ledger.calls() == 2000);
}

TEST_CASE("ledger caps evaluations and rejects out-of-bounds points") {
  const ProblemSpec& spec = problem_by_id("g8");
  EvaluationLedger capped(2);
  const std::vector<double> x{1.0, 4.0};
  evaluate_constraints(spec, x, capped);
  evaluate_constraints(spec, x, capped);
  CHECK_THROWS_AS(evaluate_constraints(spec, x, capped), BudgetError);
  CHECK(capped.calls() == 2);

  EvaluationLedger open;
  CHECK_THROWS_AS(evaluate_constraints(spec, std::vector<double>{-0.1, 4.0}, open), InputError);
  CHECK_THROWS_AS(evaluate_constraints(spec, std::vector<double>{1.0}, open), InputError);
  CHECK(open.calls() == 0);

  // The evaluator never consults history: same point, same answer.
  EvaluationLedger replay;
  const auto a = evaluate_constraints(spec, x, replay);
  const auto b = evaluate_constraints(spec, x, replay);
  CHECK(a == b);
}

TEST_CASE("published feasible points check out") {
  // G24's reported best solution (2.329520, 3.178493) sits on the boundary;
  // nudge slightly inside and check feasibility.
  const ProblemSpec& g24 = problem_by_id("g24");
  CHECK(true_feasible(g24, std::vector<double>{2.3295, 3.17}));
  CHECK_FALSE(true_feasible(g24, std::vector<double>{1.0, 0.5}));

  // G8's reported optimum region around (1.2280, 4.2454).
  const ProblemSpec& g8 = problem_by_id("g8");
  CHECK(true_feasible(g8, std::vector<double>{1.2280, 4.2454}));
  CHECK_FALSE(true_feasible(g8, std::vector<double>{5.0, 5.0}));
}
