#include "idb/sim.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <exception>
#include <thread>

#include "idb/errors.hpp"

namespace idb {

void SimParams::validate() const {
  if (population <= 0) throw UsageError("simulation population must be positive");
  if (horizon <= 0) throw UsageError("simulation horizon must be positive");
  if (daily_infection_hazard.size() != static_cast<std::size_t>(horizon) ||
      test_budget.size() != static_cast<std::size_t>(horizon)) {
    throw UsageError(fmt::format("hazard and budget schedules must have {} entries", horizon));
  }
  for (double h : daily_infection_hazard) {
    if (!is_probability(h)) throw UsageError(fmt::format("infection hazard {} outside [0,1]", h));
  }
  for (auto b : test_budget) {
    if (b < 0 || b > population) {
      throw UsageError(fmt::format("test budget {} outside [0, population]", b));
    }
  }
  if (!(triage_strength > 0.0) || !std::isfinite(triage_strength)) {
    throw UsageError("triage strength must be positive");
  }
  if (enforce_triage_invariant && triage_strength < 1.0) {
    throw UsageError(fmt::format("triage strength {} < 1 breaks testing monotonicity",
                                 triage_strength));
  }
  if (!is_probability(miss_rate_true)) throw UsageError("miss_rate_true outside [0,1]");
  if (severe_hazards) {
    const auto& s = *severe_hazards;
    if (!is_probability(s.hospitalization) || !is_probability(s.icu) || !is_probability(s.death)) {
      throw UsageError("severe hazards must be probabilities");
    }
    if (s.icu > s.hospitalization) throw UsageError("ICU hazard exceeds hospitalization hazard");
  }
}

SyntheticWorld simulate(const SimParams& params) {
  params.validate();
  const auto n = static_cast<std::size_t>(params.population);
  std::vector<PersonTrace> people(n);
  SimRng rng(params.seed);
  std::vector<std::pair<double, std::size_t>> keys;
  keys.reserve(n);

  for (int d = 0; d < params.horizon; ++d) {
    const double hazard = params.daily_infection_hazard[static_cast<std::size_t>(d)];
    for (auto& p : people) {
      if (p.infection_day) continue;
      if (rng.uniform() < hazard) {
        p.infection_day = d;
        if (params.severe_hazards) {
          double s = rng.uniform();
          p.hospitalized = s < params.severe_hazards->hospitalization;
          p.icu = s < params.severe_hazards->icu;
          p.died = rng.uniform() < params.severe_hazards->death;
        }
      }
    }

    keys.clear();
    for (std::size_t i = 0; i < n; ++i) {
      if (people[i].test_day) continue;
      double w = people[i].infection_day ? params.triage_strength : 1.0;
      keys.emplace_back(std::log(rng.uniform()) / w, i);
    }
    const auto budget = std::min<std::size_t>(
        static_cast<std::size_t>(params.test_budget[static_cast<std::size_t>(d)]), keys.size());
    auto by_key = [](const auto& a, const auto& b) {
      return a.first != b.first ? a.first > b.first : a.second < b.second;
    };
    std::partial_sort(keys.begin(), keys.begin() + static_cast<std::ptrdiff_t>(budget), keys.end(), by_key);
    std::vector<std::size_t> chosen;
    chosen.reserve(budget);
    for (std::size_t k = 0; k < budget; ++k) chosen.push_back(keys[k].second);
    std::sort(chosen.begin(), chosen.end());

    for (auto i : chosen) {
      auto& p = people[i];
      p.test_day = d;
      p.positive = p.infection_day && rng.uniform() >= params.miss_rate_true;
    }
  }
  return SyntheticWorld(params, std::move(people));
}

SyntheticWorld::SyntheticWorld(SimParams params, std::vector<PersonTrace> people)
    : params_(std::move(params)), people_(std::move(people)) {
  truth_.resize(static_cast<std::size_t>(params_.horizon));
  for (int d = 0; d < params_.horizon; ++d) {
    auto& t = truth_[static_cast<std::size_t>(d)];
    for (const auto& p : people_) {
      bool infected = p.infection_day && *p.infection_day <= d;
      bool tested = p.test_day && *p.test_day <= d;
      t.infected += infected;
      if (tested) {
        ++t.tested;
        t.tested_infected += infected;
        if (p.positive) {
          ++t.positive;
        } else {
          ++t.tested_negative;
          t.tested_negative_infected += infected;
        }
      } else {
        t.untested_infected += infected;
      }
      if (infected) {
        t.hospitalized += p.hospitalized;
        t.icu += p.icu;
        t.deaths += p.died;
      }
    }
  }
}

double SyntheticWorld::infection_rate(int day) const {
  return static_cast<double>(truth_.at(static_cast<std::size_t>(day)).infected) /
         static_cast<double>(params_.population);
}

std::optional<double> SyntheticWorld::untested_infection_rate(int day) const {
  const auto& t = truth_.at(static_cast<std::size_t>(day));
  auto untested = params_.population - t.tested;
  if (untested == 0) return std::nullopt;
  return static_cast<double>(t.untested_infected) / static_cast<double>(untested);
}

std::optional<double> SyntheticWorld::tested_infection_rate(int day) const {
  const auto& t = truth_.at(static_cast<std::size_t>(day));
  if (t.tested == 0) return std::nullopt;
  return static_cast<double>(t.tested_infected) / static_cast<double>(t.tested);
}

std::optional<double> SyntheticWorld::realized_miss_rate(int day) const {
  const auto& t = truth_.at(static_cast<std::size_t>(day));
  if (t.tested_negative == 0) return std::nullopt;
  return static_cast<double>(t.tested_negative_infected) / static_cast<double>(t.tested_negative);
}

RegionSeries SyntheticWorld::surveillance(const std::string& region_id) const {
  std::vector<DailyRecord> records;
  for (int d = 0; d < params_.horizon; ++d) {
    const auto& t = truth_[static_cast<std::size_t>(d)];
    DailyRecord r;
    r.date = date_of(d);
    r.cum_tested = t.tested;
    r.cum_positive = t.positive;
    if (params_.severe_hazards) {
      r.hosp_level = t.hospitalized;
      r.icu_level = t.icu;
      r.cum_deaths = t.deaths;
    }
    records.push_back(r);
  }
  return RegionSeries(region_id, params_.population, std::move(records));
}

void SyntheticWorld::write_truth_csv(std::ostream& out) const {
  out << "date,true_infected_count,true_untested_infected_count\n";
  for (int d = 0; d < params_.horizon; ++d) {
    const auto& t = truth_[static_cast<std::size_t>(d)];
    out << date_of(d).iso() << ',' << t.infected << ',' << t.untested_infected << '\n';
  }
}

bool CoverageReport::all_covered() const {
  return std::all_of(covered.begin(), covered.end(), [](const auto& kv) { return kv.second; });
}

CoverageReport check_coverage(const SyntheticWorld& world, const AssumptionConfig& cfg,
                              const std::vector<Method>& methods) {
  cfg.validate();
  const auto& params = world.params();
  CoverageReport report;
  report.declared_miss_rate_breach = !cfg.miss_rate.contains(params.miss_rate_true);
  report.declared_triage_breach = params.triage_strength < 1.0;

  int first_day = 0;
  while (first_day < params.horizon &&
         world.truth()[static_cast<std::size_t>(first_day)].tested == 0) {
    ++first_day;
  }
  for (auto m : methods) report.covered[m] = true;
  if (first_day == params.horizon) return report;

  auto series = world.surveillance().from(world.date_of(first_day));
  RunAssumptions run;
  run.accuracy = AccuracySpec{AccuracyKind::direct_miss_rate, cfg.miss_rate.lo, cfg.miss_rate.hi};
  run.untested = cfg.untested;
  run.alpha = cfg.alpha;

  std::map<Method, BoundSeries> computed;
  for (auto m : methods) {
    RunAssumptions r = run;
    if (m == Method::worst_case && cfg.derives_untested()) r.untested = ProbInterval{0.0, 1.0};
    try {
      computed.emplace(m, compute_bounds(series, r, m));
    } catch (const InconsistencyError& e) {
      report.inconsistencies[m] = e.what();
      report.covered[m] = false;
    }
  }

  for (int d = first_day; d < params.horizon; ++d) {
    DayAudit day;
    day.date = world.date_of(d);
    day.truth = world.infection_rate(d);
    day.tested_rate = world.tested_infection_rate(d);
    day.untested_rate = world.untested_infection_rate(d);
    day.realized_miss = world.realized_miss_rate(d);
    if (day.tested_rate && day.untested_rate) {
      double p1 = *day.tested_rate, p0 = *day.untested_rate;
      day.testing_monotone_exact = p0 <= p1;
      const auto& t = world.truth()[static_cast<std::size_t>(d)];
      double n1 = static_cast<double>(t.tested);
      double n0 = static_cast<double>(params.population - t.tested);
      double pooled = world.infection_rate(d);
      double se = std::sqrt(pooled * (1.0 - pooled) * (1.0 / n1 + 1.0 / n0));
      day.testing_monotone_flag = p0 - p1 > 3.0 * se;
    }
    if (day.realized_miss) day.miss_rate_exact = cfg.miss_rate.contains(*day.realized_miss);
    report.testing_monotone_flags += day.testing_monotone_flag;
    report.realized_miss_violations += !day.miss_rate_exact;
    report.days.push_back(std::move(day));
  }

  const bool all_exact = std::all_of(report.days.begin(), report.days.end(), [](const DayAudit& a) {
    return a.testing_monotone_exact && a.miss_rate_exact;
  });
  for (std::size_t i = 0; i < report.days.size(); ++i) {
    auto& day = report.days[i];
    bool defect = false;
    for (auto m : methods) {
      auto it = computed.find(m);
      if (it == computed.end()) {
        day.covered[m] = false;
        defect |= all_exact && m != Method::asym_refined;
        continue;
      }
      const auto& b = it->second.intervals[i];
      day.bounds[m] = b;
      bool ok = b.contains(day.truth);
      day.covered[m] = ok;
      double slack = std::min(day.truth - b.lo, b.hi - day.truth) / std::max(b.hi - b.lo, 1e-12);
      report.worst_relative_slack = std::min(report.worst_relative_slack, slack);
      if (ok) continue;
      report.covered[m] = false;
      // A date-specific bound is guaranteed when that day's realized assumptions
      // hold; the envelope needs them on every day. The asymptomatic share is not
      // simulated, so asym_refined carries no guarantee here.
      bool day_exact = day.testing_monotone_exact && day.miss_rate_exact;
      switch (m) {
        case Method::worst_case:
        case Method::testing_monotone: defect |= day_exact; break;
        case Method::temporal_envelope: defect |= all_exact; break;
        default: break;
      }
    }
    report.engine_defects += defect;
  }
  return report;
}

void CoverageSummary::add(const CoverageReport& r) {
  ++worlds;
  day_pairs += r.days.size();
  for (const auto& [m, ok] : r.covered) {
    auto& c = covered_pairs[m];
    for (const auto& day : r.days) {
      auto it = day.covered.find(m);
      c += it != day.covered.end() && it->second;
    }
  }
  audit_flags += r.audit_flags();
  worlds_with_audit_flags += r.audit_flags() > 0;
  realized_miss_violations += r.realized_miss_violations;
  engine_defects += r.engine_defects;
  valid_world_failures += r.assumptions_declared_valid() && !r.all_covered();
  worst_relative_slack = std::min(worst_relative_slack, r.worst_relative_slack);
}

void CoverageSummary::merge(const CoverageSummary& o) {
  worlds += o.worlds;
  day_pairs += o.day_pairs;
  for (const auto& [m, c] : o.covered_pairs) covered_pairs[m] += c;
  audit_flags += o.audit_flags;
  worlds_with_audit_flags += o.worlds_with_audit_flags;
  realized_miss_violations += o.realized_miss_violations;
  engine_defects += o.engine_defects;
  valid_world_failures += o.valid_world_failures;
  worst_relative_slack = std::min(worst_relative_slack, o.worst_relative_slack);
}

double CoverageSummary::coverage(Method m) const {
  if (day_pairs == 0) return 1.0;
  auto it = covered_pairs.find(m);
  return it == covered_pairs.end() ? 0.0
                                   : static_cast<double>(it->second) / static_cast<double>(day_pairs);
}

CoverageSummary run_coverage(const SimParams& params, const std::vector<std::uint64_t>& seeds,
                             const AssumptionConfig& cfg, const std::vector<Method>& methods,
                             unsigned threads) {
  params.validate();
  cfg.validate();
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, seeds.size())));
  std::vector<CoverageSummary> partial(threads);
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t k = t; k < seeds.size(); k += threads) {
          SimParams p = params;
          p.seed = seeds[k];
          partial[t].add(check_coverage(simulate(p), cfg, methods));
        }
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  CoverageSummary total;
  for (const auto& s : partial) total.merge(s);
  return total;
}

}  // namespace idb
