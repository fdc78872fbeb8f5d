#pragma once

#include <chrono>
#include <compare>
#include <string>
#include <string_view>

namespace idb {

// Calendar date with day resolution. Serialized as ISO-8601 (YYYY-MM-DD).
class Date {
 public:
  constexpr Date() = default;
  constexpr explicit Date(std::chrono::sys_days days) : days_(days) {}
  Date(int year, unsigned month, unsigned day);

  // Throws DataError on anything other than a valid YYYY-MM-DD.
  static Date parse(std::string_view text);

  std::string iso() const;
  std::chrono::sys_days days() const { return days_; }
  Date plus_days(int n) const { return Date{days_ + std::chrono::days{n}}; }

  friend constexpr auto operator<=>(const Date&, const Date&) = default;

 private:
  std::chrono::sys_days days_{};
};

}  // namespace idb
