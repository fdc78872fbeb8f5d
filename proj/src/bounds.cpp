#include "idb/bounds.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

#include "idb/errors.hpp"

namespace idb {

std::string_view method_name(Method m) {
  switch (m) {
    case Method::worst_case: return "worst_case";
    case Method::testing_monotone: return "testing_monotone";
    case Method::temporal_envelope: return "temporal_envelope";
    case Method::asym_refined: return "asym_refined";
    case Method::severe_ratio: return "severe_ratio";
    case Method::stratified: return "stratified";
  }
  return "?";
}

Method parse_method(std::string_view s) {
  if (s == "envelope") return Method::temporal_envelope;
  for (auto m : {Method::worst_case, Method::testing_monotone, Method::temporal_envelope,
                 Method::asym_refined, Method::severe_ratio, Method::stratified}) {
    if (s == method_name(m)) return m;
  }
  throw UsageError(fmt::format("unknown method '{}'", s));
}

void AssumptionConfig::validate() const {
  require_valid(miss_rate, "miss-rate interval");
  if (const auto* iv = std::get_if<ProbInterval>(&untested)) {
    require_valid(*iv, "untested infection-rate interval");
  }
  if (alpha) require_valid(*alpha, "asymptomatic-share interval");
  if (!ppv_one) throw UsageError("only PPV = 1 is supported (ppv_one must be true)");
}

namespace {

BoundInterval clamp_bound(double lo, double hi, Method method) {
  BoundInterval b{lo, hi, method, false};
  if (b.lo < 0.0 || b.lo > 1.0 || b.hi < 0.0 || b.hi > 1.0) {
    b.clamped = true;
    b.lo = std::clamp(b.lo, 0.0, 1.0);
    b.hi = std::clamp(b.hi, 0.0, 1.0);
  }
  return b;
}

// p_pos + L * P(R=0|T=1) P(T=1).
double tested_lower(const EmpiricalRates& r, double miss_lo) {
  return r.p_pos + miss_lo * r.p_neg_given_tested * r.p_tested;
}

}  // namespace

BoundInterval worst_case_bound(const EmpiricalRates& r, const AssumptionConfig& cfg) {
  cfg.validate();
  const auto* untested = std::get_if<ProbInterval>(&cfg.untested);
  if (!untested) {
    throw UsageError("worst-case bound needs an explicit untested infection-rate interval");
  }
  double lo = tested_lower(r, cfg.miss_rate.lo) + untested->lo * r.p_untested;
  double hi = r.p_pos + untested->hi * r.p_untested +
              cfg.miss_rate.hi * r.p_neg_given_tested * r.p_tested;
  return clamp_bound(lo, hi, Method::worst_case);
}

double bound_width(const BoundInterval& b) { return b.hi - b.lo; }

double monotone_untested_upper(const EmpiricalRates& r, double u_d10) {
  require_valid(ProbInterval{u_d10, u_d10}, "U_d10");
  return u_d10 + (1.0 - u_d10) * r.p_pos_given_tested;
}

BoundInterval testing_monotone_bound(const EmpiricalRates& r, const AssumptionConfig& cfg) {
  cfg.validate();
  const double u = cfg.miss_rate.hi;
  double lo = tested_lower(r, cfg.miss_rate.lo);
  double hi = r.p_pos + u * r.p_neg_given_tested * r.p_tested +
              (r.p_pos_given_tested + u * r.p_neg_given_tested) * r.p_untested;
  return clamp_bound(lo, hi, Method::testing_monotone);
}

BoundInterval date_specific_bound(const EmpiricalRates& rates, const AssumptionConfig& cfg) {
  return cfg.derives_untested() ? testing_monotone_bound(rates, cfg)
                                : worst_case_bound(rates, cfg);
}

std::vector<BoundInterval> temporal_envelope(std::span<const BoundInterval> bounds,
                                             std::span<const Date> dates) {
  if (bounds.size() != dates.size()) {
    throw UsageError("temporal envelope: bounds and dates differ in length");
  }
  for (std::size_t i = 1; i < dates.size(); ++i) {
    if (!(dates[i - 1] < dates[i])) throw UsageError("temporal envelope: dates not increasing");
  }
  std::vector<BoundInterval> out(bounds.begin(), bounds.end());
  double running = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    running = i == 0 ? bounds[i].lo : std::max(running, bounds[i].lo);
    out[i].lo = running;
  }
  for (std::size_t i = out.size(); i-- > 0;) {
    running = i + 1 == out.size() ? bounds[i].hi : std::min(running, bounds[i].hi);
    out[i].hi = running;
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].method = Method::temporal_envelope;
    if (out[i].lo > out[i].hi) {
      throw InconsistencyError(fmt::format(
          "{}: invariant envelope_not_crossed violated: lower {} > upper {}; the temporal and "
          "testing assumptions are refuted by the data",
          dates[i].iso(), out[i].lo, out[i].hi));
    }
  }
  return out;
}

double asymptomatic_refined_lower(const EmpiricalRates& r, const AssumptionConfig& cfg) {
  cfg.validate();
  if (!cfg.alpha) throw UsageError("asymptomatic refinement needs an alpha interval");
  if (cfg.alpha->hi >= 1.0) {
    throw UsageError(fmt::format("asymptomatic share upper bound must be < 1, got {}", cfg.alpha->hi));
  }
  return std::min(1.0, tested_lower(r, cfg.miss_rate.lo) / (1.0 - cfg.alpha->lo));
}

BoundInterval severe_conditional_bound(double p_severe, const BoundInterval& infection) {
  require_valid(ProbInterval{p_severe, p_severe}, "severe-outcome rate");
  require_valid(infection.interval(), "infection bound");
  if (p_severe > infection.hi) {
    throw InconsistencyError(fmt::format(
        "invariant severe_le_infected violated: P(V=1) = {} exceeds the infection upper bound {}",
        p_severe, infection.hi));
  }
  if (p_severe == 0.0) return {0.0, 0.0, Method::severe_ratio, false};
  // p_severe > 0 here, so infection.hi > 0.
  double lo = p_severe / infection.hi;
  double hi = infection.lo > 0.0 ? p_severe / infection.lo : 1.0;
  return clamp_bound(lo, hi, Method::severe_ratio);
}

StratifiedResult stratified_bound(const std::map<std::string, Stratum>& strata,
                                  const std::optional<std::map<std::string, double>>& weights) {
  if (strata.empty()) throw UsageError("stratified bound needs at least one stratum");
  StratifiedResult result;
  for (const auto& [key, s] : strata) {
    auto b = date_specific_bound(s.rates, s.cfg);
    b.method = Method::stratified;
    result.per_stratum.emplace(key, b);
  }
  if (weights) {
    double total = 0.0, lo = 0.0, hi = 0.0;
    for (const auto& [key, b] : result.per_stratum) {
      auto it = weights->find(key);
      if (it == weights->end()) throw UsageError(fmt::format("no weight for stratum '{}'", key));
      if (!is_probability(it->second)) {
        throw UsageError(fmt::format("stratum '{}' weight {} outside [0,1]", key, it->second));
      }
      total += it->second;
      lo += it->second * b.lo;
      hi += it->second * b.hi;
    }
    if (weights->size() != strata.size()) throw UsageError("weights name strata that are absent");
    if (std::abs(total - 1.0) > 1e-9) {
      throw UsageError(fmt::format("stratum weights sum to {}, not 1", total));
    }
    result.blend = clamp_bound(lo, hi, Method::stratified);
  }
  return result;
}

AssumptionConfig RunAssumptions::resolve(Date date, const EmpiricalRates& rates,
                                         std::vector<std::string>* warnings) const {
  AssumptionConfig cfg;
  if (auto it = miss_rate_by_date.find(date); it != miss_rate_by_date.end()) {
    cfg.miss_rate = it->second;
  } else {
    std::vector<std::string> local;
    cfg.miss_rate = to_miss_rate(accuracy, rates.p_pos_given_tested, &local);
    if (warnings) {
      for (auto& w : local) warnings->push_back(fmt::format("{}: {}", date.iso(), w));
    }
  }
  cfg.untested = untested;
  cfg.alpha = alpha;
  cfg.ppv_one = ppv_one;
  cfg.validate();
  return cfg;
}

BoundSeries compute_bounds(const RegionSeries& series, const RunAssumptions& assumptions,
                           Method method, std::vector<std::string>* warnings) {
  BoundSeries out;
  out.region_id = series.region_id();
  out.dates = series.dates();
  std::vector<EmpiricalRates> rates;
  for (auto d : out.dates) {
    rates.push_back(empirical_rates(series, d));
    out.configs.push_back(assumptions.resolve(d, rates.back(), warnings));
  }
  std::vector<BoundInterval> base;
  for (std::size_t i = 0; i < rates.size(); ++i) {
    if (method == Method::worst_case) {
      base.push_back(worst_case_bound(rates[i], out.configs[i]));
    } else if (method == Method::testing_monotone) {
      base.push_back(testing_monotone_bound(rates[i], out.configs[i]));
    } else {
      base.push_back(date_specific_bound(rates[i], out.configs[i]));
    }
  }
  switch (method) {
    case Method::worst_case:
    case Method::testing_monotone:
      for (std::size_t i = 0; i < base.size(); ++i) {
        if (base[i].lo > base[i].hi) {
          throw InconsistencyError(fmt::format("{}: invariant bound_not_crossed violated: {} > {}",
                                               out.dates[i].iso(), base[i].lo, base[i].hi));
        }
      }
      out.intervals = std::move(base);
      break;
    case Method::temporal_envelope:
      out.intervals = temporal_envelope(base, out.dates);
      break;
    case Method::asym_refined: {
      auto env = temporal_envelope(base, out.dates);
      double running = 0.0;
      for (std::size_t i = 0; i < env.size(); ++i) {
        double refined = asymptomatic_refined_lower(rates[i], out.configs[i]);
        running = std::max({running, refined, env[i].lo});
        env[i].lo = running;
        env[i].method = Method::asym_refined;
        if (env[i].lo > env[i].hi) {
          throw InconsistencyError(fmt::format(
              "{}: invariant refined_not_crossed violated: refined lower {} > upper {}",
              out.dates[i].iso(), env[i].lo, env[i].hi));
        }
      }
      out.intervals = std::move(env);
      break;
    }
    default:
      throw UsageError(fmt::format("method {} does not produce an infection-rate series",
                                   method_name(method)));
  }
  return out;
}

BoundSeries compute_severe(const RegionSeries& series, const RunAssumptions& assumptions,
                           Outcome outcome, std::vector<std::string>* warnings) {
  if (!series.has_outcome(outcome)) {
    std::string_view column = outcome == Outcome::hospitalization ? "hosp_level"
                              : outcome == Outcome::icu           ? "icu_level"
                                                                  : "cum_deaths";
    throw DataError(fmt::format("region '{}': column {} ({}) missing from the feed",
                                series.region_id(), column, outcome_name(outcome)));
  }
  auto infection = compute_bounds(series, assumptions, Method::temporal_envelope, warnings);
  BoundSeries out;
  out.region_id = series.region_id();
  out.dates = infection.dates;
  out.configs = infection.configs;
  for (std::size_t i = 0; i < out.dates.size(); ++i) {
    auto rates = empirical_rates(series, out.dates[i]);
    try {
      out.intervals.push_back(severe_conditional_bound(rates.severe.at(outcome), infection.intervals[i]));
    } catch (const InconsistencyError& e) {
      throw InconsistencyError(fmt::format("{} {}: {}", out.dates[i].iso(), outcome_name(outcome), e.what()));
    }
  }
  return out;
}

}  // namespace idb
