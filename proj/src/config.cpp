#include "idb/config.hpp"

#include <fmt/format.h>

#include <fstream>

#include "idb/errors.hpp"

namespace idb {

using nlohmann::json;

namespace {

ProbInterval interval_from(const json& j, const std::string& what) {
  if (!j.is_object() || !j.contains("lo") || !j.contains("hi")) {
    throw UsageError(fmt::format("config: {} must be an object with lo and hi", what));
  }
  ProbInterval iv{j.at("lo").get<double>(), j.at("hi").get<double>()};
  require_valid(iv, fmt::format("config: {}", what));
  return iv;
}

json interval_to(const ProbInterval& iv) { return json{{"lo", iv.lo}, {"hi", iv.hi}}; }

UntestedAssumption untested_from(const json& j) {
  if (j.is_string()) {
    auto s = j.get<std::string>();
    if (s == "testing_monotone" || s == "derive_by_testing_monotonicity") {
      return DeriveByTestingMonotonicity{};
    }
    throw UsageError(fmt::format("config: unknown untested assumption '{}'", s));
  }
  return interval_from(j, "assumptions.untested");
}

template <typename T>
std::vector<T> schedule(const json& j, int horizon, const std::string& what) {
  if (j.is_array()) {
    auto v = j.get<std::vector<T>>();
    if (v.size() != static_cast<std::size_t>(horizon)) {
      throw UsageError(fmt::format("config: simulation.{} has {} entries, horizon is {}", what,
                                   v.size(), horizon));
    }
    return v;
  }
  return std::vector<T>(static_cast<std::size_t>(horizon), j.get<T>());
}

std::vector<Method> methods_from(const json& j) {
  std::vector<Method> out;
  for (const auto& m : j) out.push_back(parse_method(m.get<std::string>()));
  return out;
}

CountSemantics semantics_from(const std::string& s) {
  if (s == "level") return CountSemantics::level;
  if (s == "cumulative") return CountSemantics::cumulative;
  throw UsageError(fmt::format("config: unknown count semantics '{}'", s));
}

}  // namespace

void to_json(json& j, const AccuracySpec& a) {
  j = json{{"kind", std::string(accuracy_kind_name(a.kind))}, {"lo", a.lo}, {"hi", a.hi}};
}

void from_json(const json& j, AccuracySpec& a) {
  a.kind = parse_accuracy_kind(j.at("kind").get<std::string>());
  auto iv = interval_from(j, "assumptions.accuracy");
  a.lo = iv.lo;
  a.hi = iv.hi;
}

void to_json(json& j, const AssumptionConfig& c) {
  j = json{{"miss_rate", interval_to(c.miss_rate)}, {"ppv_one", c.ppv_one}};
  if (const auto* iv = std::get_if<ProbInterval>(&c.untested)) {
    j["untested"] = interval_to(*iv);
  } else {
    j["untested"] = "testing_monotone";
  }
  if (c.alpha) j["alpha"] = interval_to(*c.alpha);
}

void from_json(const json& j, AssumptionConfig& c) {
  c = AssumptionConfig{};
  c.miss_rate = interval_from(j.at("miss_rate"), "miss_rate");
  if (j.contains("untested")) c.untested = untested_from(j.at("untested"));
  if (j.contains("alpha")) c.alpha = interval_from(j.at("alpha"), "alpha");
  c.ppv_one = j.value("ppv_one", true);
  c.validate();
}

void to_json(json& j, const RunAssumptions& r) {
  j = json{{"accuracy", r.accuracy}, {"ppv_one", r.ppv_one}};
  if (const auto* iv = std::get_if<ProbInterval>(&r.untested)) {
    j["untested"] = interval_to(*iv);
  } else {
    j["untested"] = "testing_monotone";
  }
  if (r.alpha) j["alpha"] = interval_to(*r.alpha);
  if (!r.miss_rate_by_date.empty()) {
    json by_date = json::object();
    for (const auto& [d, m] : r.miss_rate_by_date) by_date[d.iso()] = interval_to(m);
    j["miss_rate_by_date"] = by_date;
  }
}

void from_json(const json& j, RunAssumptions& r) {
  r = RunAssumptions{};
  if (j.contains("accuracy")) r.accuracy = j.at("accuracy").get<AccuracySpec>();
  if (j.contains("untested")) r.untested = untested_from(j.at("untested"));
  if (j.contains("alpha")) r.alpha = interval_from(j.at("alpha"), "assumptions.alpha");
  r.ppv_one = j.value("ppv_one", true);
  if (!r.ppv_one) throw UsageError("config: only ppv_one = true is supported");
  if (j.contains("miss_rate_by_date")) {
    for (const auto& [k, v] : j.at("miss_rate_by_date").items()) {
      r.miss_rate_by_date[Date::parse(k)] = interval_from(v, "assumptions.miss_rate_by_date." + k);
    }
  }
}

void to_json(json& j, const SimParams& p) {
  j = json{{"population", p.population},
           {"horizon", p.horizon},
           {"daily_infection_hazard", p.daily_infection_hazard},
           {"test_budget", p.test_budget},
           {"triage_strength", p.triage_strength},
           {"miss_rate_true", p.miss_rate_true},
           {"seed", p.seed},
           {"start_date", p.start_date.iso()}};
  if (p.severe_hazards) {
    j["severe_hazards"] = json{{"H", p.severe_hazards->hospitalization},
                               {"U", p.severe_hazards->icu},
                               {"D", p.severe_hazards->death}};
  }
}

void from_json(const json& j, SimParams& p) {
  p = SimParams{};
  p.population = j.at("population").get<std::int64_t>();
  p.horizon = j.at("horizon").get<int>();
  if (p.horizon <= 0) throw UsageError("config: simulation.horizon must be positive");
  p.daily_infection_hazard = schedule<double>(j.at("daily_infection_hazard"), p.horizon,
                                              "daily_infection_hazard");
  p.test_budget = schedule<std::int64_t>(j.at("test_budget"), p.horizon, "test_budget");
  p.triage_strength = j.value("triage_strength", 1.0);
  p.miss_rate_true = j.value("miss_rate_true", 0.0);
  p.seed = j.value("seed", std::uint64_t{1});
  if (j.contains("start_date")) p.start_date = Date::parse(j.at("start_date").get<std::string>());
  if (j.contains("severe_hazards")) {
    const auto& s = j.at("severe_hazards");
    p.severe_hazards = SevereHazards{s.value("H", 0.0), s.value("U", 0.0), s.value("D", 0.0)};
  }
  p.enforce_triage_invariant = j.value("enforce_triage_invariant", true);
  p.validate();
}

void to_json(json& j, const BoundInterval& b) {
  j = json{{"lo", b.lo},
           {"hi", b.hi},
           {"method", std::string(method_name(b.method))},
           {"clamped", b.clamped}};
}

void to_json(json& j, const BoundSeries& s) {
  json rows = json::array();
  for (std::size_t i = 0; i < s.dates.size(); ++i) {
    json row = s.intervals[i];
    row["date"] = s.dates[i].iso();
    rows.push_back(row);
  }
  j = json{{"region_id", s.region_id}, {"bounds", rows}};
  if (!s.configs.empty()) j["config"] = s.configs.front();
}

RunConfig RunConfig::from_json(const json& j) {
  try {
    RunConfig c;
    c.region_id = j.value("region_id", std::string("region"));
    if (j.contains("population")) c.columns.population = j.at("population").get<std::int64_t>();
    if (j.contains("input")) {
      const auto& in = j.at("input");
      if (in.contains("delimiter")) {
        auto d = in.at("delimiter").get<std::string>();
        if (d.size() != 1) throw UsageError("config: input.delimiter must be one character");
        c.columns.delimiter = d[0];
      }
      if (in.contains("columns")) {
        const auto& cols = in.at("columns");
        c.columns.date = cols.value("date", c.columns.date);
        c.columns.cum_tested = cols.value("cum_tested", c.columns.cum_tested);
        c.columns.cum_positive = cols.value("cum_positive", c.columns.cum_positive);
        c.columns.hosp_level = cols.value("hosp_level", c.columns.hosp_level);
        c.columns.icu_level = cols.value("icu_level", c.columns.icu_level);
        c.columns.cum_deaths = cols.value("cum_deaths", c.columns.cum_deaths);
      }
      c.columns.population_column = in.value("population_column", std::string{});
      if (in.contains("severe_semantics")) {
        const auto& s = in.at("severe_semantics");
        if (s.contains("hosp_level")) c.columns.semantics[Outcome::hospitalization] = semantics_from(s.at("hosp_level"));
        if (s.contains("icu_level")) c.columns.semantics[Outcome::icu] = semantics_from(s.at("icu_level"));
        if (s.contains("cum_deaths")) c.columns.semantics[Outcome::death] = semantics_from(s.at("cum_deaths"));
      }
    }
    if (!c.columns.population && c.columns.population_column.empty()) {
      c.columns.population_column = "population";
    }
    if (j.contains("window")) {
      const auto& w = j.at("window");
      c.window.threshold = w.value("threshold", kDefaultWindowThreshold);
      if (c.window.threshold < 1) throw UsageError("config: window.threshold must be >= 1");
      if (w.contains("start")) c.window.start = Date::parse(w.at("start").get<std::string>());
    }
    if (j.contains("assumptions")) c.assumptions = j.at("assumptions").get<RunAssumptions>();
    if (j.contains("sweep")) {
      const auto& s = j.at("sweep");
      SweepConfig sc;
      sc.date = Date::parse(s.at("date").get<std::string>());
      sc.grid.miss_lo_values = s.at("miss_lo").get<std::vector<double>>();
      sc.grid.miss_hi_values = s.at("miss_hi").get<std::vector<double>>();
      if (s.contains("alpha_lo")) sc.grid.alpha_lo_values = s.at("alpha_lo").get<std::vector<double>>();
      if (s.contains("methods")) sc.grid.methods = methods_from(s.at("methods"));
      c.sweep = sc;
    }
    if (j.contains("simulation")) {
      const auto& s = j.at("simulation");
      SimulationConfig sc;
      sc.params = s.get<SimParams>();
      sc.seeds = s.value("seeds", std::size_t{10});
      if (s.contains("methods")) sc.methods = methods_from(s.at("methods"));
      c.simulation = sc;
    }
    return c;
  } catch (const json::exception& e) {
    throw UsageError(fmt::format("config: {}", e.what()));
  } catch (const DataError& e) {
    throw UsageError(fmt::format("config: {}", e.what()));
  }
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError(fmt::format("{}: cannot open config file", path));
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw UsageError(fmt::format("{}: invalid JSON: {}", path, e.what()));
  }
  try {
    return from_json(j);
  } catch (const UsageError& e) {
    throw UsageError(fmt::format("{}: {}", path, e.what()));
  }
}

RegionSeries apply_window(const RegionSeries& series, const WindowConfig& window) {
  auto windowed = analysis_window(series, window.threshold);
  if (window.start) windowed = windowed.from(std::max(*window.start, windowed.records().front().date));
  return windowed;
}

AssumptionConfig constant_assumptions(const RunAssumptions& run) {
  if (run.accuracy.kind == AccuracyKind::sensitivity_interval) {
    throw UsageError("simulation needs a date-independent miss rate (npv_interval or direct_miss_rate)");
  }
  AssumptionConfig cfg;
  cfg.miss_rate = to_miss_rate(run.accuracy, 0.0);
  cfg.untested = run.untested;
  cfg.alpha = run.alpha;
  cfg.ppv_one = run.ppv_one;
  cfg.validate();
  return cfg;
}

}  // namespace idb
