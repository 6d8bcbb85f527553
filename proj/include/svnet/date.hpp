#ifndef SVNET_DATE_HPP
#define SVNET_DATE_HPP

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace svn {

/// Calendar date stored as days since 1970-01-01 (proleptic Gregorian).
class Date {
public:
    Date() : serial_(0) {}
    explicit Date(std::int32_t serial) : serial_(serial) {}

    static Date from_ymd(int year, int month, int day);
    // Strict ISO-8601 YYYY-MM-DD; nullopt on anything else.
    static std::optional<Date> parse(std::string_view iso);

    std::int32_t serial() const { return serial_; }
    int year() const;
    int month() const;
    int day() const;
    // 0 = Sunday ... 6 = Saturday
    int weekday() const { return ((serial_ % 7) + 11) % 7; }
    bool is_weekday() const {
        int w = weekday();
        return w >= 1 && w <= 5;
    }

    Date add_days(std::int32_t n) const { return Date(serial_ + n); }
    // Feb 29 anchors clamp to Feb 28 in non-leap target years.
    Date add_years(int n) const;

    std::string iso() const;

    friend auto operator<=>(const Date&, const Date&) = default;

private:
    std::int32_t serial_;
};

bool is_leap_year(int year);
int days_in_month(int year, int month);

}  // namespace svn

#endif  // SVNET_DATE_HPP
