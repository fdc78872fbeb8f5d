#pragma once

// Test-accuracy algebra under PPV = 1 (equivalently, specificity = 1).
// Everything reduces to the miss rate P(C=1 | T=1, R=0) = 1 - NPV.

#include <string>
#include <vector>

#include "idb/interval.hpp"

namespace idb {

// [L, U] bounds on P(C=1 | T=1, R=0).
using MissRateInterval = ProbInterval;

enum class AccuracyKind { npv_interval, sensitivity_interval, direct_miss_rate };

std::string_view accuracy_kind_name(AccuracyKind k);
AccuracyKind parse_accuracy_kind(std::string_view s);

struct AccuracySpec {
  AccuracyKind kind = AccuracyKind::npv_interval;
  double lo = 0.6;
  double hi = 0.9;

  friend bool operator==(const AccuracySpec&, const AccuracySpec&) = default;
};

// [1 - npv_hi, 1 - npv_lo].
MissRateInterval miss_rate_from_npv(double npv_lo, double npv_hi);

// Miss rate at sensitivity s with specificity 1, given the observed positive
// rate r among the tested: m(s) = r(1-s) / (s(1-r)). Not clamped.
double miss_rate_at_sensitivity(double s, double r);

// [m(sens_hi), m(sens_lo)], clamped to [0,1]. When r exceeds sens_lo the
// implied infection rate among the tested exceeds 1; the endpoint is clamped
// and a warning appended to `warnings` (if given).
MissRateInterval miss_rate_from_sensitivity(double sens_lo, double sens_hi,
                                            double p_pos_given_tested,
                                            std::vector<std::string>* warnings = nullptr);

// PPV by Bayes' theorem equals 1 exactly when specificity is 1, for any
// sensitivity > 0 and prevalence among the tested in (0, 1].
bool ppv_is_one_iff_specificity_one(double specificity, double prevalence_tested,
                                    double sensitivity = 1.0);

// PPV = sens*p / (sens*p + (1-spec)(1-p)).
double positive_predictive_value(double sensitivity, double specificity, double prevalence);

// Single normalization path to [L, U]. The sensitivity kind needs the observed
// positive rate; the other kinds ignore it.
MissRateInterval to_miss_rate(const AccuracySpec& spec, double p_pos_given_tested,
                              std::vector<std::string>* warnings = nullptr);

}  // namespace idb
