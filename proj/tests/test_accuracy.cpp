#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "idb/accuracy.hpp"
#include "idb/errors.hpp"

using namespace idb;

TEST_CASE("NPV interval to miss rate") {
  auto m = miss_rate_from_npv(0.6, 0.9);
  CHECK(m.lo == doctest::Approx(0.1));
  CHECK(m.hi == doctest::Approx(0.4));
  CHECK_THROWS_AS(miss_rate_from_npv(0.9, 0.6), UsageError);
  CHECK_THROWS_AS(miss_rate_from_npv(-0.1, 0.6), UsageError);
}

TEST_CASE("miss rate at a given sensitivity") {
  // Prevalence among the tested is r / s; Bayes on the negative results.
  const double s = 0.7, r = 0.2;
  const double pi = r / s;
  const double brute = pi * (1 - s) / (pi * (1 - s) + (1 - pi));
  CHECK(miss_rate_at_sensitivity(s, r) == doctest::Approx(brute).epsilon(1e-14));
  CHECK(miss_rate_at_sensitivity(1.0, 0.3) == 0.0);
  CHECK_THROWS_AS(miss_rate_at_sensitivity(0.5, 1.0), UsageError);
  CHECK_THROWS_AS(miss_rate_at_sensitivity(0.0, 0.1), UsageError);
}

TEST_CASE("sensitivity interval maps to a decreasing miss-rate interval") {
  auto m = miss_rate_from_sensitivity(0.6, 0.9, 0.1);
  CHECK(m.lo == doctest::Approx(miss_rate_at_sensitivity(0.9, 0.1)));
  CHECK(m.hi == doctest::Approx(miss_rate_at_sensitivity(0.6, 0.1)));
  CHECK(m.lo <= m.hi);
}

TEST_CASE("positivity above the sensitivity lower bound clamps with a warning") {
  std::vector<std::string> warnings;
  auto m = miss_rate_from_sensitivity(0.3, 0.9, 0.4, &warnings);
  CHECK(m.hi == 1.0);
  CHECK(warnings.size() == 1);
}

TEST_CASE("PPV equals one exactly when specificity equals one") {
  CHECK(ppv_is_one_iff_specificity_one(1.0, 0.2));
  CHECK_FALSE(ppv_is_one_iff_specificity_one(0.99, 0.2));
  CHECK_FALSE(ppv_is_one_iff_specificity_one(0.5, 0.5));
  CHECK(positive_predictive_value(0.8, 0.5, 0.5) == doctest::Approx(0.4 / 0.65));
  CHECK_THROWS_AS(ppv_is_one_iff_specificity_one(1.0, 0.0), UsageError);
}

TEST_CASE("accuracy spec dispatch") {
  CHECK(to_miss_rate({AccuracyKind::npv_interval, 0.6, 0.9}, 0.2).hi == doctest::Approx(0.4));
  CHECK(to_miss_rate({AccuracyKind::direct_miss_rate, 0.05, 0.3}, 0.2).lo == 0.05);
  CHECK(parse_accuracy_kind("sensitivity_interval") == AccuracyKind::sensitivity_interval);
  CHECK_THROWS_AS(parse_accuracy_kind("npv"), UsageError);
}
