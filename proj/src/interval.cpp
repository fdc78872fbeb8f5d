#include "idb/interval.hpp"

#include <fmt/format.h>

#include <cmath>
#include <cstdlib>

#include "idb/errors.hpp"

namespace idb {

bool is_probability(double x) { return std::isfinite(x) && x >= 0.0 && x <= 1.0; }

void require_valid(const ProbInterval& iv, const std::string& what) {
  if (!is_probability(iv.lo) || !is_probability(iv.hi)) {
    throw UsageError(fmt::format("{}: endpoints must lie in [0,1], got [{}, {}]", what,
                                 iv.lo, iv.hi));
  }
  if (iv.lo > iv.hi) {
    throw UsageError(
        fmt::format("{}: interval order violated, lo {} > hi {}", what, iv.lo, iv.hi));
  }
}

ProbInterval parse_interval(const std::string& text) {
  auto colon = text.find(':');
  if (colon == std::string::npos) {
    throw UsageError(fmt::format("expected LO:HI, got '{}'", text));
  }
  auto parse_one = [&](const std::string& s) {
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size()) {
      throw UsageError(fmt::format("expected LO:HI, got '{}'", text));
    }
    return v;
  };
  ProbInterval iv{parse_one(text.substr(0, colon)), parse_one(text.substr(colon + 1))};
  require_valid(iv, text);
  return iv;
}

}  // namespace idb
