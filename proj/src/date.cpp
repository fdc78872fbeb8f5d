#include "idb/date.hpp"

#include <fmt/format.h>

#include <charconv>

#include "idb/errors.hpp"

namespace idb {

Date::Date(int year, unsigned month, unsigned day) {
  std::chrono::year_month_day ymd{std::chrono::year{year}, std::chrono::month{month},
                                  std::chrono::day{day}};
  if (!ymd.ok()) {
    throw DataError(fmt::format("invalid calendar date {}-{}-{}", year, month, day));
  }
  days_ = std::chrono::sys_days{ymd};
}

namespace {

bool parse_digits(std::string_view s, int& out) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && p == s.data() + s.size();
}

}  // namespace

Date Date::parse(std::string_view text) {
  int y = 0, m = 0, d = 0;
  if (text.size() != 10 || text[4] != '-' || text[7] != '-' ||
      !parse_digits(text.substr(0, 4), y) || !parse_digits(text.substr(5, 2), m) ||
      !parse_digits(text.substr(8, 2), d)) {
    throw DataError(fmt::format("malformed date '{}' (expected YYYY-MM-DD)", text));
  }
  return Date(y, static_cast<unsigned>(m), static_cast<unsigned>(d));
}

std::string Date::iso() const {
  std::chrono::year_month_day ymd{days_};
  return fmt::format("{:04d}-{:02d}-{:02d}", static_cast<int>(ymd.year()),
                     static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
}

}  // namespace idb
