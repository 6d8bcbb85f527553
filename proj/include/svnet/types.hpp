#ifndef SVNET_TYPES_HPP
#define SVNET_TYPES_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "svnet/date.hpp"

namespace svn {

enum class Registration : std::uint8_t { direct, nominee };

enum class SectorCode : std::uint8_t {
    households,
    non_financial,
    financial_insurance,
    general_government,
    non_profit,
    rest_world,
    unknown,  // sentinel for investors absent from the attributes file
};

enum class Gender : std::uint8_t { male, female, no_gender };

std::string_view to_string(Registration r);
std::string_view to_string(SectorCode s);
std::string_view to_string(Gender g);

Registration parse_registration(std::string_view token);
SectorCode parse_sector(std::string_view token);
Gender parse_gender(std::string_view token);

inline constexpr std::string_view kNoAge = "NoAge";
inline constexpr std::string_view kNoRegion = "NoRegion";

// One marketplace trade record.
struct Transaction {
    std::string investor_id;
    std::string security_id;
    Date trade_date;
    std::int64_t buy_volume = 0;   // shares, >= 0
    std::int64_t sell_volume = 0;  // shares, >= 0
    Registration registration = Registration::direct;
};

struct InvestorAttributes {
    std::string investor_id;
    SectorCode sector = SectorCode::unknown;
    std::string location;      // region category, kNoRegion when absent
    Gender gender = Gender::no_gender;
    std::string birth_decade;  // e.g. "1950", kNoAge when absent
};

struct SecurityCalendar {
    std::string security_id;
    Date ipo_date;
    std::vector<Date> trading_days;  // strictly increasing, >=1 trade each
};

// Per (investor, security, day) net volumes; total_buy + total_sell > 0.
struct DailyNetVolume {
    std::string investor_id;
    std::string security_id;
    Date date;
    std::int64_t total_buy = 0;
    std::int64_t total_sell = 0;
};

// Half-open analysis window anchored at the IPO date.
struct Window {
    Date begin;
    Date end;   // exclusive
    int index;  // 1 or 2

    bool contains(Date d) const { return begin <= d && d < end; }
    std::string label() const { return "Y" + std::to_string(index); }
};

}  // namespace svn

#endif  // SVNET_TYPES_HPP
