#pragma once

#include <chrono>
#include <cstdint>
#include <string>

namespace radmort {

// Calendar dates are carried as days since the civil epoch (1970-01-01).
// Window arithmetic uses 365.25 days per year throughout.
using Date = std::chrono::sys_days;

inline constexpr double kDaysPerYear = 365.25;

Date parse_date(const std::string& iso);   // "YYYY-MM-DD"; throws ValidationError
std::string format_date(Date d);

inline double days_between(Date from, Date to) {
    return static_cast<double>((to - from).count());
}

inline int year_of(Date d) {
    return static_cast<int>(std::chrono::year_month_day(d).year());
}

Date add_days(Date d, double days);  // rounds to the nearest whole day

}  // namespace radmort
