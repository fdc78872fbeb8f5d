#include "idb/ingest.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>

#include "idb/errors.hpp"
#include "idb/interval.hpp"

namespace idb {

std::string_view outcome_code(Outcome o) {
  switch (o) {
    case Outcome::hospitalization: return "H";
    case Outcome::icu: return "U";
    case Outcome::death: return "D";
  }
  return "?";
}

std::string_view outcome_name(Outcome o) {
  switch (o) {
    case Outcome::hospitalization: return "hospitalization";
    case Outcome::icu: return "icu";
    case Outcome::death: return "death";
  }
  return "?";
}

Outcome parse_outcome(std::string_view code) {
  if (code == "H" || code == "hospitalization") return Outcome::hospitalization;
  if (code == "U" || code == "icu") return Outcome::icu;
  if (code == "D" || code == "death") return Outcome::death;
  throw UsageError(fmt::format("unknown severe outcome '{}'", code));
}

std::optional<std::int64_t> DailyRecord::severe(Outcome o) const {
  switch (o) {
    case Outcome::hospitalization: return hosp_level;
    case Outcome::icu: return icu_level;
    case Outcome::death: return cum_deaths;
  }
  return std::nullopt;
}

namespace {

std::string where(const DailyRecord& r, std::size_t index) {
  return fmt::format("record {} ({})", index, r.date.iso());
}

void check_record(const DailyRecord& r, std::size_t index, std::int64_t population) {
  auto fail = [&](std::string_view invariant, const std::string& detail) {
    throw DataError(fmt::format("{}: invariant {} violated: {}", where(r, index), invariant,
                                detail));
  };
  auto check_count = [&](std::string_view name, std::int64_t v) {
    if (v < 0) fail("nonnegative_counts", fmt::format("{} = {}", name, v));
    if (v > population) {
      fail("count_le_population", fmt::format("{} = {} exceeds population {}", name, v,
                                              population));
    }
  };
  check_count("cum_tested", r.cum_tested);
  check_count("cum_positive", r.cum_positive);
  if (r.hosp_level) check_count("hosp_level", *r.hosp_level);
  if (r.icu_level) check_count("icu_level", *r.icu_level);
  if (r.cum_deaths) check_count("cum_deaths", *r.cum_deaths);
  if (r.cum_positive > r.cum_tested) {
    fail("positive_le_tested",
         fmt::format("cum_positive {} > cum_tested {}", r.cum_positive, r.cum_tested));
  }
  if (r.hosp_level && r.icu_level && *r.icu_level > *r.hosp_level) {
    fail("icu_le_hosp",
         fmt::format("icu_level {} > hosp_level {}", *r.icu_level, *r.hosp_level));
  }
}

struct CumulativeField {
  std::string_view name;
  std::optional<std::int64_t> (*get)(const DailyRecord&);
  void (*set)(DailyRecord&, std::int64_t);
};

std::vector<CumulativeField> cumulative_fields(
    const std::map<Outcome, CountSemantics>& semantics) {
  std::vector<CumulativeField> fields = {
      {"cum_tested", [](const DailyRecord& r) -> std::optional<std::int64_t> { return r.cum_tested; },
       [](DailyRecord& r, std::int64_t v) { r.cum_tested = v; }},
      {"cum_positive", [](const DailyRecord& r) -> std::optional<std::int64_t> { return r.cum_positive; },
       [](DailyRecord& r, std::int64_t v) { r.cum_positive = v; }},
  };
  auto is_cumulative = [&](Outcome o) {
    auto it = semantics.find(o);
    return it != semantics.end() && it->second == CountSemantics::cumulative;
  };
  if (is_cumulative(Outcome::hospitalization)) {
    fields.push_back({"hosp_level", [](const DailyRecord& r) { return r.hosp_level; },
                      [](DailyRecord& r, std::int64_t v) { r.hosp_level = v; }});
  }
  if (is_cumulative(Outcome::icu)) {
    fields.push_back({"icu_level", [](const DailyRecord& r) { return r.icu_level; },
                      [](DailyRecord& r, std::int64_t v) { r.icu_level = v; }});
  }
  if (is_cumulative(Outcome::death)) {
    fields.push_back({"cum_deaths", [](const DailyRecord& r) { return r.cum_deaths; },
                      [](DailyRecord& r, std::int64_t v) { r.cum_deaths = v; }});
  }
  return fields;
}

}  // namespace

RegionSeries::RegionSeries(std::string region_id, std::int64_t population,
                           std::vector<DailyRecord> records,
                           std::map<Outcome, CountSemantics> semantics)
    : region_id_(std::move(region_id)),
      population_(population),
      records_(std::move(records)),
      semantics_(std::move(semantics)) {
  if (population_ <= 0) {
    throw DataError(fmt::format("region '{}': invariant positive_population violated: {}",
                                region_id_, population_));
  }
  if (records_.empty()) {
    throw DataError(fmt::format("region '{}': no records", region_id_));
  }
  auto fields = cumulative_fields(semantics_);
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const auto& r = records_[i];
    check_record(r, i, population_);
    if (i == 0) continue;
    const auto& prev = records_[i - 1];
    if (!(prev.date < r.date)) {
      throw DataError(fmt::format("{}: invariant dates_strictly_increasing violated after {}",
                                  where(r, i), prev.date.iso()));
    }
    for (const auto& f : fields) {
      auto a = f.get(prev), b = f.get(r);
      if (a && b && *b < *a) {
        throw DataError(fmt::format("{}: invariant {}_nondecreasing violated: {} < {}",
                                    where(r, i), f.name, *b, *a));
      }
    }
  }
}

std::vector<Date> RegionSeries::dates() const {
  std::vector<Date> out;
  out.reserve(records_.size());
  for (const auto& r : records_) out.push_back(r.date);
  return out;
}

const DailyRecord& RegionSeries::at(Date d) const {
  auto it = std::lower_bound(records_.begin(), records_.end(), d,
                             [](const DailyRecord& r, Date x) { return r.date < x; });
  if (it == records_.end() || it->date != d) {
    throw DataError(fmt::format("region '{}': date {} absent from series", region_id_, d.iso()));
  }
  return *it;
}

bool RegionSeries::has_date(Date d) const {
  auto it = std::lower_bound(records_.begin(), records_.end(), d,
                             [](const DailyRecord& r, Date x) { return r.date < x; });
  return it != records_.end() && it->date == d;
}

bool RegionSeries::has_outcome(Outcome o) const {
  return std::all_of(records_.begin(), records_.end(),
                     [o](const DailyRecord& r) { return r.severe(o).has_value(); });
}

RegionSeries RegionSeries::from(Date start) const {
  std::vector<DailyRecord> tail;
  for (const auto& r : records_) {
    if (r.date >= start) tail.push_back(r);
  }
  if (tail.empty()) {
    throw DataError(fmt::format("region '{}': no records on or after {}", region_id_, start.iso()));
  }
  return RegionSeries(region_id_, population_, std::move(tail), semantics_);
}

namespace {

std::vector<std::string> split(std::string_view line, char delim) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(delim, start);
    auto field = line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start);
    // Trim surrounding blanks and quotes.
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r')) {
      field.remove_suffix(1);
    }
    if (field.size() >= 2 && field.front() == '"' && field.back() == '"') {
      field = field.substr(1, field.size() - 2);
    }
    out.emplace_back(field);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::optional<std::int64_t> parse_count(const std::string& s, std::size_t row,
                                        std::string_view column, bool required) {
  if (s.empty()) {
    if (required) {
      throw DataError(fmt::format("row {}: malformed row: column '{}' is empty", row, column));
    }
    return std::nullopt;
  }
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) {
    // Accept integral values written with a trailing ".0".
    double d = 0.0;
    auto [p2, ec2] = std::from_chars(s.data(), s.data() + s.size(), d);
    if (ec2 != std::errc{} || p2 != s.data() + s.size() || d != static_cast<double>(static_cast<std::int64_t>(d))) {
      throw DataError(fmt::format("row {}: malformed row: column '{}' value '{}' is not an integer count",
                                  row, column, s));
    }
    v = static_cast<std::int64_t>(d);
  }
  if (v < 0) {
    throw DataError(fmt::format("row {}: invariant nonnegative_counts violated: {} = {}", row, column, v));
  }
  return v;
}

}  // namespace

ParseResult parse_region_series(std::string_view raw, const ColumnMapping& schema,
                                const std::string& region_id, RepairMode repair) {
  std::vector<std::string_view> lines;
  {
    std::size_t start = 0;
    while (start <= raw.size()) {
      auto pos = raw.find('\n', start);
      auto line = raw.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      lines.push_back(line);
      if (pos == std::string_view::npos) break;
      start = pos + 1;
    }
  }
  // Strip a UTF-8 byte order mark.
  if (!lines.empty() && lines[0].substr(0, 3) == "\xEF\xBB\xBF") lines[0].remove_prefix(3);
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) throw DataError(fmt::format("region '{}': no records (empty input)", region_id));

  auto header = split(lines[0], schema.delimiter);
  auto column_index = [&](const std::string& name, bool required) -> std::optional<std::size_t> {
    if (name.empty()) return std::nullopt;
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      if (required) {
        throw DataError(fmt::format("header: required column '{}' missing", name));
      }
      return std::nullopt;
    }
    return static_cast<std::size_t>(it - header.begin());
  };
  auto c_date = *column_index(schema.date, true);
  auto c_tested = *column_index(schema.cum_tested, true);
  auto c_pos = *column_index(schema.cum_positive, true);
  auto c_hosp = column_index(schema.hosp_level, false);
  auto c_icu = column_index(schema.icu_level, false);
  auto c_deaths = column_index(schema.cum_deaths, false);
  std::optional<std::size_t> c_pop;
  if (!schema.population) c_pop = column_index(schema.population_column, true);
  if (!schema.population && !c_pop) {
    throw UsageError("schema supplies neither a population nor a population column");
  }

  std::optional<std::int64_t> population = schema.population;
  std::vector<DailyRecord> records;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    auto fields = split(lines[i], schema.delimiter);
    if (fields.size() != header.size()) {
      throw DataError(fmt::format("row {}: malformed row: {} fields, header has {}", i,
                                  fields.size(), header.size()));
    }
    DailyRecord r;
    try {
      r.date = Date::parse(fields[c_date]);
    } catch (const DataError& e) {
      throw DataError(fmt::format("row {}: malformed row: {}", i, e.what()));
    }
    r.cum_tested = *parse_count(fields[c_tested], i, schema.cum_tested, true);
    r.cum_positive = *parse_count(fields[c_pos], i, schema.cum_positive, true);
    if (c_hosp) r.hosp_level = parse_count(fields[*c_hosp], i, schema.hosp_level, false);
    if (c_icu) r.icu_level = parse_count(fields[*c_icu], i, schema.icu_level, false);
    if (c_deaths) r.cum_deaths = parse_count(fields[*c_deaths], i, schema.cum_deaths, false);
    if (c_pop) {
      auto p = parse_count(fields[*c_pop], i, schema.population_column, true);
      if (!population) {
        population = p;
      } else if (*population != *p) {
        throw DataError(fmt::format("row {}: invariant stable_population violated: {} != {}", i, *p,
                                    *population));
      }
    }
    if (r.cum_positive > r.cum_tested) {
      throw DataError(fmt::format("row {} ({}): invariant positive_le_tested violated: "
                                  "cum_positive {} > cum_tested {}",
                                  i, r.date.iso(), r.cum_positive, r.cum_tested));
    }
    records.push_back(r);
  }
  if (records.empty()) throw DataError(fmt::format("region '{}': no records", region_id));

  std::stable_sort(records.begin(), records.end(),
                   [](const DailyRecord& a, const DailyRecord& b) { return a.date < b.date; });

  std::vector<std::string> repairs;
  if (repair == RepairMode::clamp) {
    for (const auto& f : cumulative_fields(schema.semantics)) {
      std::optional<std::int64_t> running;
      for (auto& r : records) {
        auto v = f.get(r);
        if (!v) continue;
        if (running && *v < *running) {
          repairs.push_back(fmt::format("{}: {} decreased from {} to {}; replaced with {}",
                                        r.date.iso(), f.name, *running, *v, *running));
          f.set(r, *running);
        } else {
          running = v;
        }
      }
    }
  }
  return ParseResult{RegionSeries(region_id, *population, std::move(records), schema.semantics),
                     std::move(repairs)};
}

ParseResult read_region_series(const std::string& path, const ColumnMapping& schema,
                               const std::string& region_id, RepairMode repair) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError(fmt::format("{}: cannot open input file", path));
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_region_series(buf.str(), schema, region_id, repair);
  } catch (const DataError& e) {
    throw DataError(fmt::format("{}: {}", path, e.what()));
  }
}

void write_canonical_csv(const RegionSeries& series, std::ostream& out) {
  const auto& recs = series.records();
  auto any = [&](Outcome o) {
    return std::any_of(recs.begin(), recs.end(), [o](const DailyRecord& r) { return r.severe(o).has_value(); });
  };
  bool severe = any(Outcome::hospitalization) || any(Outcome::icu) || any(Outcome::death);
  out << "date,cum_tested,cum_positive";
  if (severe) out << ",hosp_level,icu_level,cum_deaths";
  out << '\n';
  auto opt = [](const std::optional<std::int64_t>& v) { return v ? std::to_string(*v) : std::string{}; };
  for (const auto& r : recs) {
    out << r.date.iso() << ',' << r.cum_tested << ',' << r.cum_positive;
    if (severe) out << ',' << opt(r.hosp_level) << ',' << opt(r.icu_level) << ',' << opt(r.cum_deaths);
    out << '\n';
  }
}

std::optional<Date> window_start(const RegionSeries& series, std::int64_t threshold) {
  if (threshold < 1) throw UsageError(fmt::format("window threshold must be >= 1, got {}", threshold));
  for (const auto& r : series.records()) {
    if (r.cum_positive >= threshold) return r.date;
  }
  return std::nullopt;
}

RegionSeries analysis_window(const RegionSeries& series, std::int64_t threshold) {
  auto start = window_start(series, threshold);
  if (!start) {
    throw DataError(fmt::format("region '{}': no date with cum_positive >= {}", series.region_id(),
                                threshold));
  }
  return series.from(*start);
}

Date common_window_start(const std::vector<RegionSeries>& series, std::int64_t threshold) {
  if (series.empty()) throw UsageError("common window needs at least one series");
  std::optional<Date> latest;
  for (const auto& s : series) {
    auto start = window_start(s, threshold);
    if (!start) {
      throw DataError(fmt::format("region '{}': no date with cum_positive >= {}", s.region_id(),
                                  threshold));
    }
    if (!latest || *latest < *start) latest = start;
  }
  return *latest;
}

EmpiricalRates EmpiricalRates::from_probabilities(double p_tested, double p_pos_given_tested) {
  require_valid(ProbInterval{p_tested, p_tested}, "P(T=1)");
  require_valid(ProbInterval{p_pos_given_tested, p_pos_given_tested}, "P(R=1|T=1)");
  EmpiricalRates r;
  r.p_tested = p_tested;
  r.p_untested = 1.0 - p_tested;
  r.p_pos_given_tested = p_pos_given_tested;
  r.p_neg_given_tested = 1.0 - p_pos_given_tested;
  r.p_pos = p_pos_given_tested * p_tested;
  return r;
}

EmpiricalRates empirical_rates(const RegionSeries& series, Date date) {
  const auto& rec = series.at(date);
  if (rec.cum_tested == 0) {
    throw DataError(fmt::format("region '{}' {}: cum_tested is 0, P(R=1|T=1) undefined",
                                series.region_id(), date.iso()));
  }
  const auto pop = static_cast<double>(series.population());
  auto rates = EmpiricalRates::from_probabilities(
      static_cast<double>(rec.cum_tested) / pop,
      static_cast<double>(rec.cum_positive) / static_cast<double>(rec.cum_tested));
  for (auto o : {Outcome::hospitalization, Outcome::icu, Outcome::death}) {
    if (auto v = rec.severe(o)) rates.severe[o] = static_cast<double>(*v) / pop;
  }
  return rates;
}

}  // namespace idb
