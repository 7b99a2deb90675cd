#pragma once

#include <chrono>
#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace cometa {

/// A calendar day (UTC). Articles are dated, not timestamped.
class Date {
 public:
  constexpr Date() = default;
  constexpr explicit Date(std::chrono::sys_days days) : days_(days) {}
  Date(int year, unsigned month, unsigned day);

  /// Accepts `YYYY-MM-DD`, optionally followed by a `T...` time part which is
  /// discarded. Returns nullopt for anything else or an impossible date.
  static std::optional<Date> parse(std::string_view text);
  static Date today();

  std::chrono::sys_days days() const { return days_; }
  std::string to_string() const;

  Date operator+(int delta) const { return Date(days_ + std::chrono::days(delta)); }
  int operator-(Date other) const { return (days_ - other.days_).count(); }

  friend constexpr auto operator<=>(Date, Date) = default;
  friend constexpr bool operator==(Date, Date) = default;

 private:
  std::chrono::sys_days days_{};
};

}  // namespace cometa
