#ifndef EPICTRL_COMMON_DATES_HPP
#define EPICTRL_COMMON_DATES_HPP

#include <chrono>
#include <string>

namespace epictrl {

/// Calendar day, stored as days since the civil epoch (1970-01-01).
/// Thin wrapper so daily-grid arithmetic stays integer.
class Date {
public:
    Date() = default;
    explicit Date(std::chrono::sys_days d) : days_(d) {}
    Date(int year, unsigned month, unsigned day);

    /// Parses "YYYY-MM-DD". Throws ParseError on malformed input.
    static Date parse(const std::string& iso);

    std::string to_string() const;

    Date operator+(int days) const { return Date(days_ + std::chrono::days(days)); }
    int operator-(const Date& other) const {
        return static_cast<int>((days_ - other.days_).count());
    }
    auto operator<=>(const Date&) const = default;

    std::chrono::sys_days sys() const { return days_; }

private:
    std::chrono::sys_days days_{};
};

/// First and last calendar day of a quarter like "2020-Q2".
struct Quarter {
    int year = 0;
    int q = 0; // 1..4

    static Quarter parse(const std::string& text); // throws ParseError
    Date first_day() const;
    Date last_day() const;
    /// Anchor date used when interpolating quarterly values to a daily grid.
    Date midpoint() const;
    std::string to_string() const;
    auto operator<=>(const Quarter&) const = default;
};

} // namespace epictrl

#endif
