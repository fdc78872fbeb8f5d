#pragma once

#include <optional>
#include <vector>

#include "idb/bounds.hpp"

namespace idb {

struct SweepGrid {
  std::vector<double> miss_lo_values;
  std::vector<double> miss_hi_values;
  // Empty: no asymptomatic axis.
  std::vector<double> alpha_lo_values;
  std::vector<Method> methods{Method::temporal_envelope};
};

struct SweepRow {
  double miss_lo = 0.0;
  double miss_hi = 0.0;
  std::optional<double> alpha_lo;
  Method method = Method::temporal_envelope;
  BoundInterval bound;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  // Grid points dropped because miss_lo > miss_hi.
  std::size_t skipped = 0;
};

// Evaluates every valid grid point on `eval_date`. The miss-rate axes replace
// the accuracy spec of `base`; `base` supplies the untested assumption and
// alpha_hi. Rows are ordered by (miss_lo, miss_hi, alpha_lo, method) in the
// order the axes were given.
SweepResult run_sweep(const RegionSeries& series, const SweepGrid& grid, Date eval_date,
                      const RunAssumptions& base = {});

}  // namespace idb
