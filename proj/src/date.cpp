#include "svnet/date.hpp"

#include <array>
#include <charconv>
#include <cstdio>

namespace svn {
namespace {

// Civil-from-days and days-from-civil follow the classic era decomposition
// (valid over the full int32 range, far beyond any market data).
std::int32_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const int era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
                         static_cast<unsigned>(d) - 1u;
    const unsigned doe = yoe * 365u + yoe / 4u - yoe / 100u + doy;
    return era * 146097 + static_cast<std::int32_t>(doe) - 719468;
}

struct Ymd {
    int y;
    int m;
    int d;
};

Ymd civil_from_days(std::int32_t z) {
    z += 719468;
    const int era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const int y = static_cast<int>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp < 10 ? mp + 3 : mp - 9;
    return {y + (m <= 2), static_cast<int>(m), static_cast<int>(d)};
}

}  // namespace

bool is_leap_year(int year) {
    return year % 4 == 0 && (year % 100 != 0 || year % 400 == 0);
}

int days_in_month(int year, int month) {
    static constexpr std::array<int, 12> lengths = {31, 28, 31, 30, 31, 30,
                                                    31, 31, 30, 31, 30, 31};
    if (month == 2 && is_leap_year(year)) return 29;
    return lengths[month - 1];
}

Date Date::from_ymd(int year, int month, int day) {
    return Date(days_from_civil(year, month, day));
}

std::optional<Date> Date::parse(std::string_view iso) {
    if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-') return std::nullopt;
    auto read = [&](std::size_t pos, std::size_t len, int& out) {
        auto res = std::from_chars(iso.data() + pos, iso.data() + pos + len, out);
        return res.ec == std::errc() && res.ptr == iso.data() + pos + len;
    };
    int y = 0, m = 0, d = 0;
    if (!read(0, 4, y) || !read(5, 2, m) || !read(8, 2, d)) return std::nullopt;
    if (m < 1 || m > 12 || d < 1 || d > days_in_month(y, m)) return std::nullopt;
    return from_ymd(y, m, d);
}

int Date::year() const { return civil_from_days(serial_).y; }
int Date::month() const { return civil_from_days(serial_).m; }
int Date::day() const { return civil_from_days(serial_).d; }

Date Date::add_years(int n) const {
    Ymd c = civil_from_days(serial_);
    int y = c.y + n;
    int d = c.d;
    int limit = days_in_month(y, c.m);
    if (d > limit) d = limit;
    return from_ymd(y, c.m, d);
}

std::string Date::iso() const {
    Ymd c = civil_from_days(serial_);
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", c.y, c.m, c.d);
    return buf;
}

}  // namespace svn
