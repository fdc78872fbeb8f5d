#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "idb/bounds.hpp"
#include "idb/errors.hpp"
#include "idb/ingest.hpp"
#include "properties.hpp"

using namespace idb;

namespace {

std::vector<Date> days(int n) {
  std::vector<Date> out;
  for (int i = 0; i < n; ++i) out.push_back(Date(2020, 3, 16).plus_days(i));
  return out;
}

BoundInterval iv(double lo, double hi) { return {lo, hi, Method::testing_monotone, false}; }

}  // namespace

TEST_CASE("grid identities and random nesting properties") {
  auto s = props::run_all(99, 500);
  for (const auto& f : s.failures) MESSAGE(f);
  CHECK(s.cases >= 10000);
  CHECK(s.ok());
}

TEST_CASE("temporal envelope: running max and suffix min") {
  std::vector<BoundInterval> b{iv(0.1, 0.9), iv(0.05, 0.8), iv(0.2, 0.95)};
  auto e = temporal_envelope(b, days(3));
  CHECK(e[0].lo == 0.1);
  CHECK(e[1].lo == 0.1);
  CHECK(e[2].lo == 0.2);
  CHECK(e[0].hi == 0.8);
  CHECK(e[1].hi == 0.8);
  CHECK(e[2].hi == 0.95);
  CHECK(e[0].method == Method::temporal_envelope);

  auto single = temporal_envelope(std::vector<BoundInterval>{iv(0.2, 0.3)}, days(1));
  CHECK(single[0].lo == 0.2);
  CHECK(single[0].hi == 0.3);

  std::vector<BoundInterval> crossing{iv(0.5, 0.9), iv(0.1, 0.4)};
  CHECK_THROWS_AS(temporal_envelope(crossing, days(2)), InconsistencyError);
}

TEST_CASE("degenerate rates") {
  AssumptionConfig cfg;
  auto none_tested = testing_monotone_bound(EmpiricalRates::from_probabilities(0.0, 0.0), cfg);
  CHECK(none_tested.lo == 0.0);
  CHECK(none_tested.hi == doctest::Approx(0.4));
  auto all_positive = testing_monotone_bound(EmpiricalRates::from_probabilities(0.3, 1.0), cfg);
  CHECK(all_positive.hi == doctest::Approx(1.0));

  AssumptionConfig exact;
  exact.miss_rate = {0.2, 0.2};
  exact.untested = ProbInterval{0.05, 0.05};
  auto w = worst_case_bound(EmpiricalRates::from_probabilities(0.1, 0.3), exact);
  CHECK(w.lo == doctest::Approx(w.hi));
  CHECK(w.lo == doctest::Approx(0.03 + 0.2 * 0.07 + 0.05 * 0.9));

  CHECK_THROWS_AS(worst_case_bound(EmpiricalRates::from_probabilities(0.1, 0.3), cfg), UsageError);
}

TEST_CASE("asymptomatic refinement scales the lower bound") {
  auto r = EmpiricalRates::from_probabilities(0.01, 0.2);
  AssumptionConfig cfg;
  CHECK_THROWS_AS(asymptomatic_refined_lower(r, cfg), UsageError);
  cfg.alpha = ProbInterval{0.0, 0.5};
  CHECK(asymptomatic_refined_lower(r, cfg) == doctest::Approx(testing_monotone_bound(r, cfg).lo));
  cfg.alpha = ProbInterval{0.25, 0.5};
  CHECK(asymptomatic_refined_lower(r, cfg) ==
        doctest::Approx(testing_monotone_bound(r, cfg).lo / 0.75));
  cfg.alpha = ProbInterval{0.25, 1.0};
  CHECK_THROWS_AS(asymptomatic_refined_lower(r, cfg), UsageError);
  cfg.alpha = ProbInterval{0.99, 0.995};
  CHECK(asymptomatic_refined_lower(EmpiricalRates::from_probabilities(0.5, 0.5), cfg) == 1.0);
}

TEST_CASE("severe ratio bound") {
  auto b = severe_conditional_bound(0.001, iv(0.01, 0.5));
  CHECK(b.lo == doctest::Approx(0.002));
  CHECK(b.hi == doctest::Approx(0.1));
  CHECK(severe_conditional_bound(0.001, iv(0.0, 0.5)).hi == 1.0);
  CHECK(severe_conditional_bound(0.0, iv(0.0, 0.5)).hi == 0.0);
  CHECK_THROWS_AS(severe_conditional_bound(0.6, iv(0.1, 0.5)), InconsistencyError);
  // Wider infection bounds give wider severe bounds.
  for (double lo = 0.01; lo < 0.2; lo += 0.01) {
    auto narrow = severe_conditional_bound(0.005, iv(lo + 0.01, 0.4));
    auto wide = severe_conditional_bound(0.005, iv(lo, 0.5));
    CHECK(wide.lo <= narrow.lo);
    CHECK(wide.hi >= narrow.hi);
  }
}

TEST_CASE("stratified bounds and blend") {
  std::map<std::string, Stratum> strata;
  strata["a"] = {EmpiricalRates::from_probabilities(0.1, 0.2), {}};
  strata["b"] = {EmpiricalRates::from_probabilities(0.05, 0.4), {}};
  auto res = stratified_bound(strata, std::map<std::string, double>{{"a", 0.3}, {"b", 0.7}});
  REQUIRE(res.blend);
  auto a = testing_monotone_bound(strata["a"].rates, {});
  auto b = testing_monotone_bound(strata["b"].rates, {});
  CHECK(res.blend->lo == doctest::Approx(0.3 * a.lo + 0.7 * b.lo));
  CHECK(res.blend->hi == doctest::Approx(0.3 * a.hi + 0.7 * b.hi));
  CHECK_FALSE(stratified_bound(strata).blend);
  CHECK_THROWS_AS(stratified_bound(strata, std::map<std::string, double>{{"a", 0.3}, {"b", 0.6}}),
                  UsageError);
  CHECK_THROWS_AS(stratified_bound({}), UsageError);
}

TEST_CASE("series pipeline and severe outcomes") {
  std::string raw =
      "date,cum_tested,cum_positive,hosp_level,icu_level,cum_deaths\n"
      "2020-03-16,1000,200,50,10,5\n2020-03-17,2000,300,60,12,8\n2020-03-18,3000,350,55,11,9\n";
  ColumnMapping m;
  m.population = 100000;
  auto s = parse_region_series(raw, m, "x").series;
  RunAssumptions run;
  auto env = compute_bounds(s, run, Method::temporal_envelope);
  auto daily = compute_bounds(s, run, Method::testing_monotone);
  REQUIRE(env.intervals.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(props::nested(env.intervals[i], daily.intervals[i]));

  auto h = compute_severe(s, run, Outcome::hospitalization);
  CHECK(h.intervals[0].hi == doctest::Approx(0.0005 / env.intervals[0].lo));

  auto no_severe = parse_region_series("date,cum_tested,cum_positive\n2020-03-16,10,2\n", m, "y").series;
  try {
    compute_severe(no_severe, run, Outcome::death);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("cum_deaths") != std::string::npos);
  }
}

TEST_CASE("method names") {
  CHECK(parse_method("envelope") == Method::temporal_envelope);
  CHECK(parse_method(method_name(Method::asym_refined)) == Method::asym_refined);
  CHECK_THROWS_AS(parse_method("bogus"), UsageError);
}
