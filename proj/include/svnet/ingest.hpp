#ifndef SVNET_INGEST_HPP
#define SVNET_INGEST_HPP

#include <istream>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "svnet/types.hpp"

namespace svn {

enum class InputFormat { csv, jsonl };

// Transactions file: header
//   investor_id,security_id,trade_date,buy_volume,sell_volume,registration
// Dates ISO-8601. Rows with buy == sell == 0 or negative volumes are
// rejected with a diagnostic naming the line. Row order is preserved.
std::vector<Transaction> parse_transactions(std::istream& in,
                                            InputFormat format = InputFormat::csv);

// Attributes file: header investor_id,sector_code,location,gender,birth_decade.
// Empty demographic fields map to the NoGender / NoAge / NoRegion sentinels.
std::vector<InvestorAttributes> parse_attributes(std::istream& in);

struct CalendarEntry {
    std::string security_id;
    Date ipo_date;
};

// Calendar file: header security_id,ipo_date.
std::vector<CalendarEntry> parse_calendar(std::istream& in);

std::vector<Transaction> filter_universe(std::vector<Transaction> txns,
                                         bool exclude_nominee);

// Sums buys and sells per (investor, security, date). Output sorted by
// (security, investor, date); total volumes are conserved exactly.
std::vector<DailyNetVolume> aggregate_daily(std::span<const Transaction> txns);

// Distinct trade dates of one security inside [ipo, ipo + 2y).
SecurityCalendar build_security_calendar(std::span<const DailyNetVolume> daily,
                                         const std::string& security_id,
                                         Date ipo_date);

// Two consecutive windows anchored at the IPO date. When `data_end` is given
// and the second window runs past it, throws DataError flagging truncation.
std::pair<Window, Window> build_windows(Date ipo_date,
                                        std::optional<Date> data_end = std::nullopt,
                                        int window_years = 1);

}  // namespace svn

#endif  // SVNET_INGEST_HPP
