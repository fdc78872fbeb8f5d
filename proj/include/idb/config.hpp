#pragma once

// JSON run configuration shared by every subcommand.
//
//   {
//     "region_id": "italy",
//     "population": 60359546,
//     "input": {"delimiter": ",", "columns": {"cum_tested": "tamponi"},
//               "population_column": "", "severe_semantics": {"hosp_level": "level"}},
//     "window": {"threshold": 100, "start": "2020-03-16"},
//     "assumptions": {"accuracy": {"kind": "npv_interval", "lo": 0.6, "hi": 0.9},
//                     "untested": "testing_monotone" | {"lo": 0, "hi": 1},
//                     "alpha": {"lo": 0.25, "hi": 0.5}, "ppv_one": true,
//                     "miss_rate_by_date": {"2020-03-16": {"lo": 0.1, "hi": 0.4}}},
//     "sweep": {"date": "2020-04-06", "miss_lo": [...], "miss_hi": [...],
//               "alpha_lo": [...], "methods": ["envelope"]},
//     "simulation": {"population": 5000, "horizon": 30, "daily_infection_hazard": 0.01,
//                    "test_budget": 25, "triage_strength": 2, "miss_rate_true": 0.2,
//                    "severe_hazards": {"H": 0.1, "U": 0.02, "D": 0.01}, "seed": 1,
//                    "seeds": 10, "start_date": "2020-03-01",
//                    "methods": ["testing_monotone", "envelope"]}
//   }

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "idb/bounds.hpp"
#include "idb/ingest.hpp"
#include "idb/sim.hpp"
#include "idb/sweep.hpp"

namespace idb {

struct WindowConfig {
  std::int64_t threshold = kDefaultWindowThreshold;
  // Later of this and the threshold date.
  std::optional<Date> start;
};

struct SweepConfig {
  SweepGrid grid;
  Date date;
};

struct SimulationConfig {
  SimParams params;
  std::size_t seeds = 10;
  std::vector<Method> methods{Method::testing_monotone, Method::temporal_envelope};
};

struct RunConfig {
  std::string region_id = "region";
  ColumnMapping columns;
  WindowConfig window;
  RunAssumptions assumptions;
  std::optional<SweepConfig> sweep;
  std::optional<SimulationConfig> simulation;

  // Throws UsageError naming the offending key.
  static RunConfig from_json(const nlohmann::json& j);
  static RunConfig load(const std::string& path);
};

// Applies the configured window to a parsed series.
RegionSeries apply_window(const RegionSeries& series, const WindowConfig& window);

// Assumptions with a date-independent miss rate, as used by the simulator.
AssumptionConfig constant_assumptions(const RunAssumptions& run);

void to_json(nlohmann::json& j, const AccuracySpec& a);
void from_json(const nlohmann::json& j, AccuracySpec& a);
void to_json(nlohmann::json& j, const AssumptionConfig& c);
void from_json(const nlohmann::json& j, AssumptionConfig& c);
void to_json(nlohmann::json& j, const RunAssumptions& r);
void from_json(const nlohmann::json& j, RunAssumptions& r);
void to_json(nlohmann::json& j, const SimParams& p);
void from_json(const nlohmann::json& j, SimParams& p);
void to_json(nlohmann::json& j, const BoundInterval& b);
void to_json(nlohmann::json& j, const BoundSeries& s);

}  // namespace idb
