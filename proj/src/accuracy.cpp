#include "idb/accuracy.hpp"

#include <fmt/format.h>

#include <algorithm>

#include "idb/errors.hpp"

namespace idb {

std::string_view accuracy_kind_name(AccuracyKind k) {
  switch (k) {
    case AccuracyKind::npv_interval: return "npv_interval";
    case AccuracyKind::sensitivity_interval: return "sensitivity_interval";
    case AccuracyKind::direct_miss_rate: return "direct_miss_rate";
  }
  return "?";
}

AccuracyKind parse_accuracy_kind(std::string_view s) {
  for (auto k : {AccuracyKind::npv_interval, AccuracyKind::sensitivity_interval,
                 AccuracyKind::direct_miss_rate}) {
    if (s == accuracy_kind_name(k)) return k;
  }
  throw UsageError(fmt::format("unknown accuracy kind '{}'", s));
}

MissRateInterval miss_rate_from_npv(double npv_lo, double npv_hi) {
  require_valid(ProbInterval{npv_lo, npv_hi}, "NPV interval");
  return {1.0 - npv_hi, 1.0 - npv_lo};
}

double miss_rate_at_sensitivity(double s, double r) {
  if (!(s > 0.0) || s > 1.0) throw UsageError(fmt::format("sensitivity must be in (0,1], got {}", s));
  if (!is_probability(r)) throw UsageError(fmt::format("P(R=1|T=1) must be in [0,1], got {}", r));
  if (r >= 1.0) {
    throw UsageError("P(R=1|T=1) = 1: no negative results, miss rate undefined");
  }
  return r * (1.0 - s) / (s * (1.0 - r));
}

MissRateInterval miss_rate_from_sensitivity(double sens_lo, double sens_hi, double r,
                                            std::vector<std::string>* warnings) {
  if (!(sens_lo > 0.0) || sens_lo > sens_hi || sens_hi > 1.0) {
    throw UsageError(fmt::format(
        "sensitivity interval must satisfy 0 < lo <= hi <= 1, got [{}, {}]", sens_lo, sens_hi));
  }
  // m is decreasing in s.
  double lo = miss_rate_at_sensitivity(sens_hi, r);
  double hi = miss_rate_at_sensitivity(sens_lo, r);
  if (hi > 1.0 || lo > 1.0) {
    if (warnings) {
      warnings->push_back(fmt::format(
          "P(R=1|T=1) = {} exceeds sensitivity lower bound {}; miss rate clamped to 1", r, sens_lo));
    }
  }
  return {std::clamp(lo, 0.0, 1.0), std::clamp(hi, 0.0, 1.0)};
}

double positive_predictive_value(double sensitivity, double specificity, double prevalence) {
  double tp = sensitivity * prevalence;
  double fp = (1.0 - specificity) * (1.0 - prevalence);
  return tp / (tp + fp);
}

bool ppv_is_one_iff_specificity_one(double specificity, double prevalence_tested,
                                    double sensitivity) {
  if (!(prevalence_tested > 0.0) || prevalence_tested > 1.0) {
    throw UsageError(fmt::format(
        "PPV/specificity equivalence needs P(C=1|T=1) in (0,1], got {}", prevalence_tested));
  }
  if (!is_probability(specificity)) {
    throw UsageError(fmt::format("specificity must be in [0,1], got {}", specificity));
  }
  if (!(sensitivity > 0.0) || sensitivity > 1.0) {
    throw UsageError(fmt::format("sensitivity must be in (0,1], got {}", sensitivity));
  }
  return positive_predictive_value(sensitivity, specificity, prevalence_tested) == 1.0;
}

MissRateInterval to_miss_rate(const AccuracySpec& spec, double r,
                              std::vector<std::string>* warnings) {
  switch (spec.kind) {
    case AccuracyKind::npv_interval:
      return miss_rate_from_npv(spec.lo, spec.hi);
    case AccuracyKind::sensitivity_interval:
      return miss_rate_from_sensitivity(spec.lo, spec.hi, r, warnings);
    case AccuracyKind::direct_miss_rate: {
      MissRateInterval m{spec.lo, spec.hi};
      require_valid(m, "miss-rate interval");
      return m;
    }
  }
  throw UsageError("unknown accuracy kind");
}

}  // namespace idb
