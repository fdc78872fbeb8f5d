#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "idb/errors.hpp"
#include "idb/sim.hpp"

using namespace idb;

namespace {

SimParams small(std::uint64_t seed) {
  SimParams p;
  p.population = 10;
  p.horizon = 3;
  p.daily_infection_hazard = {0.3, 0.2, 0.25};
  p.test_budget = {2, 3, 4};
  p.triage_strength = 3.0;
  p.miss_rate_true = 0.3;
  p.severe_hazards = SevereHazards{0.4, 0.2, 0.1};
  p.seed = seed;
  return p;
}

// Straight-line reading of the documented sampling recipe.
std::vector<PersonTrace> replay(const SimParams& p) {
  std::mt19937_64 eng(p.seed);
  auto u = [&] { return (double(eng() >> 11) + 0.5) / 9007199254740992.0; };
  std::vector<PersonTrace> people(std::size_t(p.population));
  for (int d = 0; d < p.horizon; ++d) {
    for (auto& x : people) {
      if (x.infection_day) continue;
      if (u() < p.daily_infection_hazard[std::size_t(d)]) {
        x.infection_day = d;
        double s = u();
        x.hospitalized = s < p.severe_hazards->hospitalization;
        x.icu = s < p.severe_hazards->icu;
        x.died = u() < p.severe_hazards->death;
      }
    }
    std::vector<std::size_t> idx;
    std::vector<double> key(people.size());
    for (std::size_t i = 0; i < people.size(); ++i) {
      if (people[i].test_day) continue;
      key[i] = std::log(u()) / (people[i].infection_day ? p.triage_strength : 1.0);
      idx.push_back(i);
    }
    std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return key[a] > key[b]; });
    idx.resize(std::min<std::size_t>(idx.size(), std::size_t(p.test_budget[std::size_t(d)])));
    std::sort(idx.begin(), idx.end());
    for (auto i : idx) {
      people[i].test_day = d;
      if (people[i].infection_day) people[i].positive = u() >= p.miss_rate_true;
    }
  }
  return people;
}

}  // namespace

TEST_CASE("simulator follows the documented recipe draw for draw") {
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    auto p = small(seed);
    CHECK(simulate(p).people() == replay(p));
  }
}

TEST_CASE("same seed, same world") {
  auto a = simulate(small(5)), b = simulate(small(5));
  CHECK(a.people() == b.people());
  std::ostringstream sa, sb;
  a.write_truth_csv(sa);
  b.write_truth_csv(sb);
  CHECK(sa.str() == sb.str());
}

TEST_CASE("selection probabilities match exact enumeration") {
  // Two people, one day, one test. Enumerate infection states; with one pick
  // the weighted sampler selects person i with probability w_i / sum(w).
  const double h = 0.3, w = 4.0;
  double exact = 0.0;  // P(tested person infected)
  for (int c0 = 0; c0 < 2; ++c0) {
    for (int c1 = 0; c1 < 2; ++c1) {
      double ps = (c0 ? h : 1 - h) * (c1 ? h : 1 - h);
      double w0 = c0 ? w : 1.0, w1 = c1 ? w : 1.0;
      exact += ps * (w0 * c0 + w1 * c1) / (w0 + w1);
    }
  }
  SimParams p;
  p.population = 2;
  p.horizon = 1;
  p.daily_infection_hazard = {h};
  p.test_budget = {1};
  p.triage_strength = w;
  const int n = 40000;
  int hits = 0;
  for (int k = 0; k < n; ++k) {
    p.seed = std::uint64_t(k);
    hits += simulate(p).truth()[0].tested_infected;
  }
  double freq = double(hits) / n;
  double se = std::sqrt(exact * (1 - exact) / n);
  CHECK(std::abs(freq - exact) < 4 * se);
  // Testing monotonicity in expectation: P(C|T=1) >= P(C|T=0) = 2h - P(C|T=1).
  CHECK(exact >= 2 * h - exact);
}

TEST_CASE("hazard zero: nobody infected, nobody positive") {
  SimParams p;
  p.population = 200;
  p.horizon = 10;
  p.daily_infection_hazard.assign(10, 0.0);
  p.test_budget.assign(10, 15);
  auto world = simulate(p);
  for (const auto& t : world.truth()) {
    CHECK(t.infected == 0);
    CHECK(t.positive == 0);
  }
  CHECK(world.truth().back().tested == 150);
}

TEST_CASE("truth is monotone and consistent with surveillance") {
  auto p = small(11);
  p.population = 500;
  p.horizon = 20;
  p.daily_infection_hazard.assign(20, 0.03);
  p.test_budget.assign(20, 10);
  auto world = simulate(p);
  auto s = world.surveillance();
  REQUIRE(s.size() == 20);
  for (std::size_t d = 0; d < 20; ++d) {
    const auto& t = world.truth()[d];
    CHECK(t.tested_infected + t.untested_infected == t.infected);
    CHECK(s.records()[d].cum_positive == t.positive);
    CHECK(s.records()[d].cum_tested == t.tested);
    CHECK(t.icu <= t.hospitalized);
    if (d > 0) CHECK(t.infected >= world.truth()[d - 1].infected);
  }
}

TEST_CASE("parameter validation") {
  auto p = small(1);
  p.triage_strength = 0.5;
  CHECK_THROWS_AS(simulate(p), UsageError);
  p.enforce_triage_invariant = false;
  CHECK_NOTHROW(simulate(p));
  p = small(1);
  p.severe_hazards = SevereHazards{0.1, 0.2, 0.0};
  CHECK_THROWS_AS(simulate(p), UsageError);
  p = small(1);
  p.test_budget = {1};
  CHECK_THROWS_AS(simulate(p), UsageError);
}

TEST_CASE("coverage under valid assumptions; breaches are flagged") {
  SimParams p;
  p.population = 2000;
  p.horizon = 20;
  p.daily_infection_hazard.assign(20, 0.01);
  p.test_budget.assign(20, 20);
  p.triage_strength = 3.0;
  p.miss_rate_true = 0.25;
  AssumptionConfig cfg;
  cfg.miss_rate = {0.1, 0.4};
  std::vector<std::uint64_t> seeds(30);
  std::iota(seeds.begin(), seeds.end(), 1);
  const std::vector<Method> methods{Method::testing_monotone, Method::temporal_envelope};
  auto ok = run_coverage(p, seeds, cfg, methods, 2);
  CHECK(ok.worlds == 30);
  CHECK(ok.coverage(Method::testing_monotone) == 1.0);
  CHECK(ok.coverage(Method::temporal_envelope) == 1.0);
  CHECK_FALSE(ok.failed());

  // Thread count does not change the result.
  auto serial = run_coverage(p, seeds, cfg, methods, 1);
  CHECK(serial.day_pairs == ok.day_pairs);
  CHECK(serial.covered_pairs == ok.covered_pairs);
  CHECK(serial.worst_relative_slack == ok.worst_relative_slack);

  p.miss_rate_true = 0.7;
  auto breach = run_coverage(p, seeds, cfg, methods);
  CHECK(breach.worlds_with_audit_flags == 30);

  p.miss_rate_true = 0.25;
  p.triage_strength = 0.1;
  p.enforce_triage_invariant = false;
  auto anti = run_coverage(p, seeds, cfg, methods);
  CHECK(anti.worlds_with_audit_flags == 30);
  CHECK(anti.audit_flags > 30);
}
