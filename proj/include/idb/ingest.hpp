#pragma once

// Surveillance feed ingestion: parsing, validation, windowing, and the
// per-date observable rates P(T=1), P(R=1|T=1) and severe-outcome rates.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "idb/date.hpp"

namespace idb {

enum class Outcome { hospitalization, icu, death };

// "H", "U", "D".
std::string_view outcome_code(Outcome o);
std::string_view outcome_name(Outcome o);
Outcome parse_outcome(std::string_view code);

// Whether a severe-outcome column reports a point-in-time level or a running total.
enum class CountSemantics { level, cumulative };

struct DailyRecord {
  Date date;
  std::int64_t cum_tested = 0;
  std::int64_t cum_positive = 0;
  std::optional<std::int64_t> hosp_level;
  std::optional<std::int64_t> icu_level;
  std::optional<std::int64_t> cum_deaths;

  std::optional<std::int64_t> severe(Outcome o) const;

  friend bool operator==(const DailyRecord&, const DailyRecord&) = default;
};

// Maps input column names onto DailyRecord fields. Empty name = column absent.
struct ColumnMapping {
  std::string date = "date";
  std::string cum_tested = "cum_tested";
  std::string cum_positive = "cum_positive";
  std::string hosp_level = "hosp_level";
  std::string icu_level = "icu_level";
  std::string cum_deaths = "cum_deaths";
  char delimiter = ',';

  // Population comes from here, or else from `population_column` of the first row.
  std::optional<std::int64_t> population;
  std::string population_column;

  std::map<Outcome, CountSemantics> semantics = {
      {Outcome::hospitalization, CountSemantics::level},
      {Outcome::icu, CountSemantics::level},
      {Outcome::death, CountSemantics::cumulative},
  };
};

enum class RepairMode { reject, clamp };

class RegionSeries {
 public:
  // Validates every type invariant; throws DataError naming the record and invariant.
  RegionSeries(std::string region_id, std::int64_t population,
               std::vector<DailyRecord> records,
               std::map<Outcome, CountSemantics> semantics = ColumnMapping{}.semantics);

  const std::string& region_id() const { return region_id_; }
  std::int64_t population() const { return population_; }
  const std::vector<DailyRecord>& records() const { return records_; }
  const std::map<Outcome, CountSemantics>& semantics() const { return semantics_; }
  std::size_t size() const { return records_.size(); }

  std::vector<Date> dates() const;
  const DailyRecord& at(Date d) const;
  bool has_date(Date d) const;
  // True when every record carries a value for the outcome.
  bool has_outcome(Outcome o) const;

  // Suffix of records dated on or after `start`.
  RegionSeries from(Date start) const;

  friend bool operator==(const RegionSeries&, const RegionSeries&) = default;

 private:
  std::string region_id_;
  std::int64_t population_;
  std::vector<DailyRecord> records_;
  std::map<Outcome, CountSemantics> semantics_;
};

struct ParseResult {
  RegionSeries series;
  // One line per value replaced in clamp repair mode.
  std::vector<std::string> repairs;
};

ParseResult parse_region_series(std::string_view raw, const ColumnMapping& schema,
                                const std::string& region_id,
                                RepairMode repair = RepairMode::reject);

ParseResult read_region_series(const std::string& path, const ColumnMapping& schema,
                               const std::string& region_id,
                               RepairMode repair = RepairMode::reject);

// Canonical schema: date,cum_tested,cum_positive[,hosp_level,icu_level,cum_deaths].
// Optional columns are written when any record carries them.
void write_canonical_csv(const RegionSeries& series, std::ostream& out);

constexpr std::int64_t kDefaultWindowThreshold = 100;

// First date with cum_positive >= threshold; nullopt if none.
std::optional<Date> window_start(const RegionSeries& series, std::int64_t threshold);

// Suffix starting at the first date with cum_positive >= threshold.
RegionSeries analysis_window(const RegionSeries& series,
                             std::int64_t threshold = kDefaultWindowThreshold);

// First date on which every series has reached the threshold.
Date common_window_start(const std::vector<RegionSeries>& series,
                         std::int64_t threshold = kDefaultWindowThreshold);

struct EmpiricalRates {
  double p_tested = 0.0;
  double p_untested = 1.0;
  double p_pos_given_tested = 0.0;
  double p_neg_given_tested = 1.0;
  double p_pos = 0.0;
  std::map<Outcome, double> severe;

  // Builds rates directly from P(T=1) and P(R=1|T=1).
  static EmpiricalRates from_probabilities(double p_tested, double p_pos_given_tested);
};

EmpiricalRates empirical_rates(const RegionSeries& series, Date date);

}  // namespace idb
