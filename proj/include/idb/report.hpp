#pragma once

// Human- and machine-readable renderings of rates, bounds, sweeps and
// coverage reports. Rounding happens here and nowhere else.

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "idb/bounds.hpp"
#include "idb/ingest.hpp"
#include "idb/sim.hpp"
#include "idb/sweep.hpp"

namespace idb {

enum class OutputFormat { text, csv, json };

OutputFormat parse_format(std::string_view s);

// Half-up rounding to `decimals` places, treating values within 1e-9 relative
// of a tie as ties.
double round_half_up(double x, int decimals);
std::string format_fixed(double x, int decimals);
// Shortest decimal that round-trips to the same double.
std::string format_exact(double x);

std::string render_rates(const RegionSeries& series, OutputFormat format);
std::string render_bounds(const BoundSeries& series, OutputFormat format);
std::string render_severe(const std::map<Outcome, BoundSeries>& by_outcome, OutputFormat format);
std::string render_sweep(const SweepResult& sweep, OutputFormat format);
std::string render_coverage(const CoverageSummary& summary, const std::vector<Method>& methods,
                            OutputFormat format);

// One row of the BoundSeries CSV `date,method,lo,hi,clamped`.
struct BoundRow {
  Date date;
  std::string method;
  double lo = 0.0;
  double hi = 0.0;
  bool clamped = false;
  // Values as written, for exact parse-back comparison.
  std::string lo_text;
  std::string hi_text;
};

// Throws DataError naming the row on malformed input or an empty series.
std::vector<BoundRow> parse_bound_csv(std::string_view text);

// Standalone SVG band chart: date on x, [lo, hi] band on y. Each date is also
// emitted as <g class="band-point" data-date=".." data-lo=".." data-hi="..">
// carrying the CSV values verbatim.
std::string render_band_svg(const std::vector<BoundRow>& rows, const std::string& title);

}  // namespace idb
