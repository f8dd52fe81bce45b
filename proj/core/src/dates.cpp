#include "epictrl/common/dates.hpp"
#include "epictrl/common/errors.hpp"

#include <cstdio>

namespace epictrl {

Date::Date(int year, unsigned month, unsigned day)
{
    std::chrono::year_month_day ymd{std::chrono::year{year}, std::chrono::month{month},
                                    std::chrono::day{day}};
    if (!ymd.ok()) {
        throw ParseError("invalid calendar date " + std::to_string(year) + "-" +
                         std::to_string(month) + "-" + std::to_string(day));
    }
    days_ = std::chrono::sys_days{ymd};
}

Date Date::parse(const std::string& iso)
{
    int y = 0, m = 0, d = 0;
    char extra = 0;
    if (std::sscanf(iso.c_str(), "%d-%d-%d%c", &y, &m, &d, &extra) != 3) {
        throw ParseError("expected YYYY-MM-DD date, got '" + iso + "'");
    }
    return Date(y, static_cast<unsigned>(m), static_cast<unsigned>(d));
}

std::string Date::to_string() const
{
    std::chrono::year_month_day ymd{days_};
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

Quarter Quarter::parse(const std::string& text)
{
    int y = 0, q = 0;
    char extra = 0;
    if (std::sscanf(text.c_str(), "%d-Q%d%c", &y, &q, &extra) != 2 || q < 1 || q > 4) {
        throw ParseError("expected quarter like 2020-Q2, got '" + text + "'");
    }
    return Quarter{y, q};
}

Date Quarter::first_day() const
{
    return Date(year, static_cast<unsigned>(3 * (q - 1) + 1), 1);
}

Date Quarter::last_day() const
{
    Quarter next = (q == 4) ? Quarter{year + 1, 1} : Quarter{year, q + 1};
    return next.first_day() + (-1);
}

Date Quarter::midpoint() const
{
    Date lo = first_day();
    return lo + (last_day() - lo) / 2;
}

std::string Quarter::to_string() const
{
    return std::to_string(year) + "-Q" + std::to_string(q);
}

} // namespace epictrl
