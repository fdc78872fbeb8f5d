#include "idb/sweep.hpp"

#include <fmt/format.h>

#include <algorithm>

#include "idb/errors.hpp"

namespace idb {

SweepResult run_sweep(const RegionSeries& series, const SweepGrid& grid, Date eval_date,
                      const RunAssumptions& base) {
  if (grid.miss_lo_values.empty() || grid.miss_hi_values.empty() || grid.methods.empty()) {
    throw UsageError("sweep grid axes must be nonempty");
  }
  if (!series.has_date(eval_date)) {
    throw UsageError(fmt::format("sweep date {} is not in the analysis window of '{}'",
                                 eval_date.iso(), series.region_id()));
  }
  const auto dates = series.dates();
  const auto index = static_cast<std::size_t>(
      std::find(dates.begin(), dates.end(), eval_date) - dates.begin());

  std::vector<std::optional<double>> alphas;
  if (grid.alpha_lo_values.empty()) {
    alphas.push_back(std::nullopt);
  } else {
    alphas.assign(grid.alpha_lo_values.begin(), grid.alpha_lo_values.end());
  }

  SweepResult result;
  for (double lo : grid.miss_lo_values) {
    for (double hi : grid.miss_hi_values) {
      if (lo > hi) {
        result.skipped += alphas.size();
        continue;
      }
      for (const auto& alpha_lo : alphas) {
        RunAssumptions run = base;
        run.accuracy = AccuracySpec{AccuracyKind::direct_miss_rate, lo, hi};
        run.miss_rate_by_date.clear();
        if (alpha_lo) {
          double alpha_hi = base.alpha ? std::max(base.alpha->hi, *alpha_lo) : *alpha_lo;
          run.alpha = ProbInterval{*alpha_lo, alpha_hi};
        }
        for (Method m : grid.methods) {
          if (m == Method::asym_refined && !run.alpha) {
            throw UsageError("sweep method asym_refined needs alpha_lo values or a base alpha");
          }
          auto bounds = compute_bounds(series, run, m);
          result.rows.push_back(SweepRow{lo, hi, alpha_lo, m, bounds.intervals[index]});
        }
      }
    }
  }
  if (result.rows.empty()) throw UsageError("empty valid grid: every point has miss_lo > miss_hi");
  return result;
}

}  // namespace idb
