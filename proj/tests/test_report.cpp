#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <regex>

#include "idb/errors.hpp"
#include "idb/report.hpp"

using namespace idb;

TEST_CASE("half-up rounding at emission") {
  CHECK(format_fixed(0.0005, 3) == "0.001");
  CHECK(format_fixed(0.0015, 3) == "0.002");
  CHECK(format_fixed(0.00044999, 3) == "0.000");
  CHECK(format_fixed(0.5104, 3) == "0.510");
  CHECK(format_fixed(0.000035, 5) == "0.00004");
  CHECK(round_half_up(0.125, 2) == doctest::Approx(0.13));
  CHECK(std::stod(format_exact(0.1 + 0.2)) == 0.1 + 0.2);
}

TEST_CASE("bound CSV parse and SVG band") {
  BoundSeries s;
  s.region_id = "x";
  for (int i = 0; i < 3; ++i) {
    s.dates.push_back(Date(2020, 3, 16).plus_days(i));
    s.intervals.push_back({0.001 * i, 0.5 - 0.01 * i, Method::temporal_envelope, false});
  }
  auto csv = render_bounds(s, OutputFormat::csv);
  CHECK(csv.rfind("date,method,lo,hi,clamped\n", 0) == 0);
  auto rows = parse_bound_csv(csv);
  REQUIRE(rows.size() == 3);
  CHECK(rows[1].lo == s.intervals[1].lo);
  CHECK(rows[2].hi == s.intervals[2].hi);

  auto svg = render_band_svg(rows, "x");
  std::regex point(R"re(data-date="([0-9-]+)" data-method="([a-z_]+)" data-lo="([^"]+)" data-hi="([^"]+)")re");
  std::size_t found = 0;
  for (std::sregex_iterator it(svg.begin(), svg.end(), point), end; it != end; ++it, ++found) {
    REQUIRE(found < rows.size());
    CHECK((*it)[1] == rows[found].date.iso());
    CHECK((*it)[3] == rows[found].lo_text);
    CHECK((*it)[4] == rows[found].hi_text);
  }
  CHECK(found == 3);
}

TEST_CASE("single-date plot and empty input") {
  auto rows = parse_bound_csv("date,method,lo,hi,clamped\n2020-03-16,temporal_envelope,0.1,0.5,0\n");
  auto svg = render_band_svg(rows, "one");
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("data-lo=\"0.1\"") != std::string::npos);
  CHECK_THROWS_AS(parse_bound_csv("date,method,lo,hi,clamped\n"), DataError);
  CHECK_THROWS_AS(parse_bound_csv(""), DataError);
  CHECK_THROWS_AS(parse_bound_csv("date,method,lo,hi,clamped\n2020-03-16,x,0.1\n"), DataError);
}

TEST_CASE("sweep CSV header and skipped note") {
  SweepResult r;
  r.rows.push_back({0.1, 0.4, std::nullopt, Method::temporal_envelope, {0.1, 0.4, Method::temporal_envelope, false}});
  auto csv = render_sweep(r, OutputFormat::csv);
  CHECK(csv.rfind("miss_lo,miss_hi,alpha_lo,method,lo,hi\n", 0) == 0);
  CHECK(csv.find("skipped") == std::string::npos);
  r.skipped = 2;
  CHECK(render_sweep(r, OutputFormat::csv).find("# skipped 2") != std::string::npos);
}
