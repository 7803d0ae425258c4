#include "radmort/dates.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

#include "radmort/errors.hpp"

namespace radmort {

Date parse_date(const std::string& iso) {
    int y = 0, m = 0, d = 0;
    const char* p = iso.c_str();
    if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-')
        throw ValidationError("bad date '" + iso + "': expected YYYY-MM-DD");
    auto r1 = std::from_chars(p, p + 4, y);
    auto r2 = std::from_chars(p + 5, p + 7, m);
    auto r3 = std::from_chars(p + 8, p + 10, d);
    if (r1.ec != std::errc{} || r2.ec != std::errc{} || r3.ec != std::errc{} ||
        r1.ptr != p + 4 || r2.ptr != p + 7 || r3.ptr != p + 10)
        throw ValidationError("bad date '" + iso + "': expected YYYY-MM-DD");
    std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{unsigned(m)},
                                    std::chrono::day{unsigned(d)}};
    if (!ymd.ok()) throw ValidationError("bad date '" + iso + "': not a valid calendar date");
    return std::chrono::sys_days{ymd};
}

std::string format_date(Date date) {
    std::chrono::year_month_day ymd{date};
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

Date add_days(Date d, double days) {
    return d + std::chrono::days{static_cast<std::int64_t>(std::llround(days))};
}

}  // namespace radmort
