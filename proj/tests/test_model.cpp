#include <doctest.h>

#include <string>

#include "mgdispatch/model.hpp"

using namespace mgdispatch;

namespace {

bool mentions(const ValidationReport& report, const std::string& needle) {
  for (const auto& v : report.violations) {
    if (v.message.find(needle) != std::string::npos || v.path.find(needle) != std::string::npos)
      return true;
  }
  return false;
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("case study carries the expected parameters") {
  const DispatchProblem p = builtin_case_study();
  CHECK(p.horizon == 8);
  REQUIRE(p.num_generators() == 3);
  REQUIRE(p.num_loads() == 3);
  REQUIRE(p.num_farms() == 4);

  CHECK(p.generators[0].b == doctest::Approx(14.0));
  CHECK(p.generators[0].a == doctest::Approx(0.006));
  CHECK(p.generators[1].p_max == doctest::Approx(80.0));
  CHECK(p.generators[2].p_min == doctest::Approx(10.0));
  CHECK(p.generators[2].b == doctest::Approx(50.0));
  CHECK(p.generators[1].ramp_up == doctest::Approx(35.0));

  CHECK(p.loads[0].c == doctest::Approx(-0.20));
  CHECK(p.loads[1].d == doctest::Approx(30.0));
  CHECK(p.loads[2].p_max == doctest::Approx(45.0));

  CHECK(p.prices.beta[4] == doctest::Approx(6.80));
  CHECK(p.prices.alpha[4] == doctest::Approx(8.50));
  CHECK(p.fixed_demand[4] == doctest::Approx(75.0));
  CHECK(p.p_r_max == doctest::Approx(60.0));
  CHECK(p.p_r_min == doctest::Approx(0.0));
  CHECK(p.spinning_reserve.minCoeff() == doctest::Approx(6.66));
  CHECK(p.spinning_reserve.maxCoeff() == doctest::Approx(6.66));
}

TEST_CASE("case study validates clean") {
  CHECK(validate_problem(builtin_case_study()).ok());
}

TEST_CASE("selling price sits at 80 percent of the purchase price") {
  const DispatchProblem p = builtin_case_study();
  for (int t = 0; t < p.horizon; ++t)
    CHECK(p.prices.beta[t] / p.prices.alpha[t] == doctest::Approx(0.8).epsilon(1e-12));
}

TEST_CASE("ramp limits are symmetric in the case study") {
  for (const auto& g : builtin_case_study().generators)
    CHECK(g.ramp_up == doctest::Approx(g.ramp_down));
}

TEST_CASE("initial generation anchors at the lower bounds") {
  const DispatchProblem p = builtin_case_study();
  for (int m = 0; m < p.num_generators(); ++m)
    CHECK(p.initial_gen[m] == doctest::Approx(p.generators[static_cast<size_t>(m)].p_min));
}

TEST_CASE("beta above alpha is flagged with the slot index") {
  DispatchProblem p = builtin_case_study();
  p.prices.beta[4] = 9.0;  // slot 5 has alpha = 8.5
  const ValidationReport report = validate_problem(p);
  CHECK(!report.ok());
  CHECK(mentions(report, "beta exceeds alpha at slot 5"));
}

TEST_CASE("oversized reserve is a reserve infeasibility") {
  DispatchProblem p = builtin_case_study();
  p.spinning_reserve[0] = 300.0;  // total capacity is 235
  const ValidationReport report = validate_problem(p);
  CHECK(!report.ok());
  CHECK(mentions(report, "reserve infeasible at slot 1"));
}

TEST_CASE("structural violations are reported exhaustively") {
  DispatchProblem p = builtin_case_study();
  p.generators[0].p_min = 75.0;  // above p_max = 70
  p.generators[1].ramp_up = 0.0;
  p.loads[0].c = 0.2;            // convex utility
  p.prices.alpha[2] = -1.0;
  const ValidationReport report = validate_problem(p);
  CHECK(report.violations.size() >= 4);
  CHECK(mentions(report, "generators[0]"));
  CHECK(mentions(report, "generators[1].ramp_up"));
  CHECK(mentions(report, "loads[0].c"));
  CHECK(mentions(report, "prices.alpha"));
}

TEST_CASE("correlation matrix must be a valid correlation") {
  DispatchProblem p = builtin_case_study();
  p.farm_correlation(0, 1) = 0.9;  // asymmetric now
  CHECK(mentions(validate_problem(p), "symmetric"));

  p = builtin_case_study();
  p.farm_correlation(1, 1) = 2.0;
  CHECK(mentions(validate_problem(p), "diagonal"));

  p = builtin_case_study();
  p.farm_correlation.setConstant(-0.5);
  p.farm_correlation.diagonal().setOnes();
  CHECK(mentions(validate_problem(p), "positive semidefinite"));
}

TEST_CASE("supply and demand ranges must overlap") {
  DispatchProblem p = builtin_case_study();
  p.fixed_demand[3] = 500.0;  // no feasible balance
  CHECK(mentions(validate_problem(p), "no balanced schedule exists at slot 4"));
}

TEST_CASE("decreasing cost on the feasible range is rejected") {
  DispatchProblem p = builtin_case_study();
  p.generators[0].b = -5.0;  // b + 2 a p_min = -5 + 0.06 < 0
  CHECK(mentions(validate_problem(p), "b + 2*a*p_min"));
}

TEST_CASE("per slot coefficient schedules must match the horizon") {
  DispatchProblem p = builtin_case_study();
  p.generators[0].a_by_slot = {0.006, 0.006};
  CHECK(mentions(validate_problem(p), "a_by_slot"));
  p.generators[0].a_by_slot.assign(8, 0.006);
  CHECK(validate_problem(p).ok());
}

}  // TEST_SUITE
