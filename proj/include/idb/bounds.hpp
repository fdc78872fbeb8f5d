#pragma once

// Set-valued estimates of the infection rate P(C=1) and of severe-illness
// rates conditional on infection.

#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "idb/accuracy.hpp"
#include "idb/date.hpp"
#include "idb/ingest.hpp"
#include "idb/interval.hpp"

namespace idb {

// Untested infection rate P(C=1|T=0) is bounded through testing monotonicity.
struct DeriveByTestingMonotonicity {
  friend bool operator==(const DeriveByTestingMonotonicity&,
                         const DeriveByTestingMonotonicity&) = default;
};

using UntestedAssumption = std::variant<ProbInterval, DeriveByTestingMonotonicity>;

struct AssumptionConfig {
  MissRateInterval miss_rate{0.1, 0.4};
  UntestedAssumption untested = DeriveByTestingMonotonicity{};
  // Asymptomatic share of infections.
  std::optional<ProbInterval> alpha;
  // P(C=1|R=1) = 1. Only true is supported.
  bool ppv_one = true;

  bool derives_untested() const {
    return std::holds_alternative<DeriveByTestingMonotonicity>(untested);
  }
  // Throws UsageError on any out-of-range or misordered interval, or ppv_one == false.
  void validate() const;

  friend bool operator==(const AssumptionConfig&, const AssumptionConfig&) = default;
};

enum class Method {
  worst_case,
  testing_monotone,
  temporal_envelope,
  asym_refined,
  severe_ratio,
  stratified,
};

std::string_view method_name(Method m);
// Accepts the names above plus "envelope" for temporal_envelope.
Method parse_method(std::string_view s);

struct BoundInterval {
  double lo = 0.0;
  double hi = 1.0;
  Method method = Method::worst_case;
  // Set when an endpoint fell outside [0,1] before clamping.
  bool clamped = false;

  ProbInterval interval() const { return {lo, hi}; }
  bool contains(double x) const { return lo <= x && x <= hi; }

  friend bool operator==(const BoundInterval&, const BoundInterval&) = default;
};

struct BoundSeries {
  std::string region_id;
  std::vector<Date> dates;
  std::vector<BoundInterval> intervals;
  // Assumptions in force on each date.
  std::vector<AssumptionConfig> configs;
};

BoundInterval worst_case_bound(const EmpiricalRates& rates, const AssumptionConfig& cfg);

double bound_width(const BoundInterval& b);

// U_d0 = u + (1 - u) r.
double monotone_untested_upper(const EmpiricalRates& rates, double u_d10);

BoundInterval testing_monotone_bound(const EmpiricalRates& rates, const AssumptionConfig& cfg);

// Dispatches on cfg.untested: explicit interval -> worst case, else testing monotone.
BoundInterval date_specific_bound(const EmpiricalRates& rates, const AssumptionConfig& cfg);

// Running max of lower bounds, suffix min of upper bounds. `dates` names the
// offending date when the envelope crosses (InconsistencyError).
std::vector<BoundInterval> temporal_envelope(std::span<const BoundInterval> bounds,
                                             std::span<const Date> dates);

// (1 - alpha_lo)^-1 times the testing-monotone lower bound, clamped to 1.
double asymptomatic_refined_lower(const EmpiricalRates& rates, const AssumptionConfig& cfg);

// P(V=1|C=1) = P(V=1)/P(C=1) evaluated at the infection bound's endpoints.
BoundInterval severe_conditional_bound(double p_severe, const BoundInterval& infection);

struct Stratum {
  EmpiricalRates rates;
  AssumptionConfig cfg;
};

struct StratifiedResult {
  std::map<std::string, BoundInterval> per_stratum;
  // Population blend sum_x w_x * bound_x, when weights were given.
  std::optional<BoundInterval> blend;
};

StratifiedResult stratified_bound(const std::map<std::string, Stratum>& strata,
                                  const std::optional<std::map<std::string, double>>& weights =
                                      std::nullopt);

// Assumptions as declared for a run: accuracy in any of its three forms,
// optional per-date miss-rate overrides, and the untested/alpha choices.
struct RunAssumptions {
  AccuracySpec accuracy{};
  std::map<Date, MissRateInterval> miss_rate_by_date;
  UntestedAssumption untested = DeriveByTestingMonotonicity{};
  std::optional<ProbInterval> alpha;
  bool ppv_one = true;

  AssumptionConfig resolve(Date date, const EmpiricalRates& rates,
                           std::vector<std::string>* warnings = nullptr) const;
};

// Per-date bounds over every date in `series` for worst_case, testing_monotone,
// temporal_envelope or asym_refined. The envelope is taken over the
// date-specific bounds implied by `assumptions.untested`.
BoundSeries compute_bounds(const RegionSeries& series, const RunAssumptions& assumptions,
                           Method method, std::vector<std::string>* warnings = nullptr);

// Severe-outcome bounds using the temporal envelope of the infection rate.
BoundSeries compute_severe(const RegionSeries& series, const RunAssumptions& assumptions,
                           Outcome outcome, std::vector<std::string>* warnings = nullptr);

}  // namespace idb
