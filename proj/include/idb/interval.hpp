#pragma once

#include <string>

namespace idb {

// Closed subinterval [lo, hi] of [0, 1].
struct ProbInterval {
  double lo = 0.0;
  double hi = 1.0;

  bool contains(double x) const { return lo <= x && x <= hi; }
  bool contains(const ProbInterval& o) const { return lo <= o.lo && o.hi <= hi; }
  double width() const { return hi - lo; }

  friend bool operator==(const ProbInterval&, const ProbInterval&) = default;
};

// Throws UsageError naming `what` unless 0 <= lo <= hi <= 1.
void require_valid(const ProbInterval& iv, const std::string& what);

// Parses "LO:HI" as used on the command line.
ProbInterval parse_interval(const std::string& text);

bool is_probability(double x);

}  // namespace idb
