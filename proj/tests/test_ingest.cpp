#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <sstream>

#include "idb/errors.hpp"
#include "idb/ingest.hpp"

using namespace idb;

namespace {

ColumnMapping italy_schema() {
  ColumnMapping m;
  m.population = 60359546;
  return m;
}

const char* kItalyRows =
    "date,cum_tested,cum_positive,hosp_level,icu_level,cum_deaths\n"
    "2020-03-16,137962,27980,12876,1851,2158\n"
    "2020-03-17,148657,31506,14954,2060,2503\n"
    "2020-03-18,165541,35713,16620,2257,2978\n";

std::string error_of(std::string_view raw, ColumnMapping m = italy_schema(),
                     RepairMode mode = RepairMode::reject) {
  try {
    parse_region_series(raw, m, "t", mode);
  } catch (const DataError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("three well-formed rows") {
  auto r = parse_region_series(kItalyRows, italy_schema(), "italy");
  CHECK(r.series.size() == 3);
  CHECK(r.series.population() == 60359546);
  CHECK(r.repairs.empty());
  CHECK(r.series.records()[1].hosp_level == 14954);
  CHECK(r.series.has_outcome(Outcome::death));
}

TEST_CASE("rows are sorted by date; CRLF, BOM and quotes are accepted") {
  std::string raw =
      "\xEF\xBB\xBF\"date\",\"cum_tested\",\"cum_positive\"\r\n"
      "2020-03-17,20,3\r\n"
      "2020-03-16,10,\"2\"\r\n";
  ColumnMapping m;
  m.population = 1000;
  auto r = parse_region_series(raw, m, "x");
  REQUIRE(r.series.size() == 2);
  CHECK(r.series.records()[0].date == Date(2020, 3, 16));
  CHECK(r.series.records()[0].cum_positive == 2);
  CHECK_FALSE(r.series.has_outcome(Outcome::hospitalization));
}

TEST_CASE("custom delimiter, column names and population column") {
  std::string raw = "day;tests;pos;pop\n2020-03-16;10;1;500\n2020-03-17;12;2;500\n";
  ColumnMapping m;
  m.delimiter = ';';
  m.date = "day";
  m.cum_tested = "tests";
  m.cum_positive = "pos";
  m.population_column = "pop";
  auto r = parse_region_series(raw, m, "x");
  CHECK(r.series.population() == 500);
  CHECK(r.series.records()[1].cum_tested == 12);
}

TEST_CASE("error cases name the row and the invariant") {
  CHECK(error_of("date,cum_tested,cum_positive\n").find("no records") != std::string::npos);
  CHECK(error_of("").find("no records") != std::string::npos);

  auto e = error_of("date,cum_tested,cum_positive\n2020-03-16,10,20\n");
  CHECK(e.find("row 1") != std::string::npos);
  CHECK(e.find("positive_le_tested") != std::string::npos);

  CHECK(error_of("date,cum_tested,cum_positive\n2020-03-16,10\n").find("row 1") != std::string::npos);
  CHECK(error_of("date,cum_tested,cum_positive\n2020-03-16,ten,1\n").find("not an integer") !=
        std::string::npos);
  CHECK(error_of("date,cum_tested,cum_positive\n2020-03-16,-1,0\n").find("nonnegative") !=
        std::string::npos);
  CHECK(error_of("date,cum_tested,cum_positive\n2020-02-30,1,0\n").find("row 1") != std::string::npos);
  CHECK(error_of("date,cum_tested\n2020-03-16,1\n").find("cum_positive") != std::string::npos);
  CHECK(error_of("date,cum_tested,cum_positive\n2020-03-16,1,0\n2020-03-16,2,0\n")
            .find("dates_strictly_increasing") != std::string::npos);
  CHECK(error_of("date,cum_tested,cum_positive\n2020-03-16,70000000,0\n").find("population") !=
        std::string::npos);
  CHECK(error_of("date,cum_tested,cum_positive,hosp_level,icu_level\n2020-03-16,10,5,1,2\n")
            .find("icu_le_hosp") != std::string::npos);
}

TEST_CASE("decreasing cumulative count: rejected by default, clamped on request") {
  std::string raw = "date,cum_tested,cum_positive\n2020-03-16,10,5\n2020-03-17,9,6\n2020-03-18,12,7\n";
  CHECK(error_of(raw).find("cum_tested_nondecreasing") != std::string::npos);
  auto r = parse_region_series(raw, italy_schema(), "x", RepairMode::clamp);
  CHECK(r.series.records()[1].cum_tested == 10);
  REQUIRE(r.repairs.size() == 1);
  CHECK(r.repairs[0].find("cum_tested") != std::string::npos);
}

TEST_CASE("hospital and ICU levels may fall") {
  std::string raw =
      "date,cum_tested,cum_positive,hosp_level,icu_level,cum_deaths\n"
      "2020-03-16,10,5,4,2,1\n2020-03-17,20,6,3,1,1\n";
  CHECK_NOTHROW(parse_region_series(raw, italy_schema(), "x"));
}

TEST_CASE("canonical CSV round trip on random valid series") {
  std::mt19937_64 gen(7);
  for (int k = 0; k < 200; ++k) {
    std::vector<DailyRecord> recs;
    std::int64_t tested = 0, positive = 0, deaths = 0;
    const bool severe = k % 2 == 0;
    Date d(2020, 3, 1);
    for (int i = 0, n = 1 + int(gen() % 20); i < n; ++i) {
      tested += std::int64_t(gen() % 1000);
      positive = std::min(tested, positive + std::int64_t(gen() % 200));
      DailyRecord r{d, tested, positive, std::nullopt, std::nullopt, std::nullopt};
      if (severe) {
        deaths += std::int64_t(gen() % 5);
        std::int64_t h = std::int64_t(gen() % 100);
        r.hosp_level = h;
        r.icu_level = h / 3;
        r.cum_deaths = deaths;
      }
      recs.push_back(r);
      d = d.plus_days(1 + int(gen() % 3));
    }
    RegionSeries s("r", 10'000'000, recs);
    std::ostringstream out;
    write_canonical_csv(s, out);
    ColumnMapping m;
    m.population = 10'000'000;
    CHECK(parse_region_series(out.str(), m, "r").series == s);
  }
}

TEST_CASE("analysis window") {
  std::string raw =
      "date,cum_tested,cum_positive\n2020-03-14,100,50\n2020-03-15,200,99\n2020-03-16,300,100\n"
      "2020-03-17,400,150\n";
  ColumnMapping m;
  m.population = 100000;
  auto s = parse_region_series(raw, m, "x").series;
  auto w = analysis_window(s);
  CHECK(w.records().front().date == Date(2020, 3, 16));
  CHECK(w.size() == 2);
  CHECK(analysis_window(s, 1) == s);
  CHECK_THROWS_AS(analysis_window(s, 151), DataError);
  CHECK_THROWS_AS(analysis_window(s, 0), UsageError);

  std::string later = "date,cum_tested,cum_positive\n2020-03-16,300,10\n2020-03-18,400,120\n";
  auto s2 = parse_region_series(later, m, "y").series;
  CHECK(common_window_start({s, s2}) == Date(2020, 3, 18));
}

TEST_CASE("empirical rates follow the count definitions") {
  auto s = parse_region_series(kItalyRows, italy_schema(), "italy").series;
  auto e = empirical_rates(s, Date(2020, 3, 16));
  CHECK(e.p_tested == doctest::Approx(137962.0 / 60359546.0).epsilon(1e-15));
  CHECK(e.p_pos_given_tested == doctest::Approx(27980.0 / 137962.0).epsilon(1e-15));
  CHECK(e.p_tested + e.p_untested == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(e.p_pos_given_tested + e.p_neg_given_tested == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(e.p_pos == doctest::Approx(e.p_pos_given_tested * e.p_tested).epsilon(1e-15));
  CHECK(e.p_pos == doctest::Approx(27980.0 / 60359546.0).epsilon(1e-12));
  CHECK(e.severe.at(Outcome::death) == doctest::Approx(2158.0 / 60359546.0).epsilon(1e-15));
  CHECK_THROWS_AS(empirical_rates(s, Date(2020, 4, 1)), DataError);

  // P(T=1) never falls because cum_tested never falls.
  double prev = 0.0;
  for (auto d : s.dates()) {
    double p = empirical_rates(s, d).p_tested;
    CHECK(p >= prev);
    prev = p;
  }

  ColumnMapping m;
  m.population = 10;
  auto zero = parse_region_series("date,cum_tested,cum_positive\n2020-03-16,0,0\n", m, "z").series;
  CHECK_THROWS_AS(empirical_rates(zero, Date(2020, 3, 16)), DataError);
}
