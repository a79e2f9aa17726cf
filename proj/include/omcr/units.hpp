#pragma once

// Canonical internal units: hours, dollars, kilometres.
// Calendar convention: 366-day year, 30.5-day month (so 2 months = 61 days
// and 2 years = 732 days).

namespace omcr {

inline constexpr double kHoursPerDay = 24.0;
inline constexpr double kHoursPerMonth = 30.5 * kHoursPerDay;  // 732 h
inline constexpr double kHoursPerYear = 366.0 * kHoursPerDay;  // 8784 h

constexpr double years_to_hours(double years) { return years * kHoursPerYear; }
constexpr double months_to_hours(double months) { return months * kHoursPerMonth; }
constexpr double hours_to_years(double hours) { return hours / kHoursPerYear; }

struct Point {
  double x = 0.0;
  double y = 0.0;
};

constexpr bool operator==(const Point& a, const Point& b) {
  return a.x == b.x && a.y == b.y;
}

}  // namespace omcr
