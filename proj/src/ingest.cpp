#include "svnet/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <set>
#include <string>

#include <json.hpp>

#include "svnet/common.hpp"
#include "svnet/csv.hpp"

namespace svn {

std::string_view to_string(Registration r) {
    return r == Registration::direct ? "direct" : "nominee";
}

std::string_view to_string(SectorCode s) {
    switch (s) {
        case SectorCode::households: return "Households";
        case SectorCode::non_financial: return "NonFinancial";
        case SectorCode::financial_insurance: return "FinancialInsurance";
        case SectorCode::general_government: return "GeneralGovernment";
        case SectorCode::non_profit: return "NonProfit";
        case SectorCode::rest_world: return "RestWorld";
        case SectorCode::unknown: return "Unknown";
    }
    return "Unknown";
}

std::string_view to_string(Gender g) {
    switch (g) {
        case Gender::male: return "Male";
        case Gender::female: return "Female";
        case Gender::no_gender: return "NoGender";
    }
    return "NoGender";
}

Registration parse_registration(std::string_view token) {
    if (token == "direct") return Registration::direct;
    if (token == "nominee") return Registration::nominee;
    throw DataError("unknown registration '" + std::string(token) + "'");
}

SectorCode parse_sector(std::string_view token) {
    if (token == "Households") return SectorCode::households;
    if (token == "NonFinancial") return SectorCode::non_financial;
    if (token == "FinancialInsurance") return SectorCode::financial_insurance;
    if (token == "GeneralGovernment") return SectorCode::general_government;
    if (token == "NonProfit") return SectorCode::non_profit;
    if (token == "RestWorld") return SectorCode::rest_world;
    if (token == "Unknown" || token.empty()) return SectorCode::unknown;
    throw DataError("unknown sector code '" + std::string(token) + "'");
}

Gender parse_gender(std::string_view token) {
    if (token == "Male") return Gender::male;
    if (token == "Female") return Gender::female;
    if (token == "NoGender" || token.empty()) return Gender::no_gender;
    throw DataError("unknown gender '" + std::string(token) + "'");
}

namespace {

std::int64_t parse_volume(std::string_view field, std::size_t line, const char* what) {
    std::int64_t v = 0;
    auto res = std::from_chars(field.data(), field.data() + field.size(), v);
    if (res.ec != std::errc() || res.ptr != field.data() + field.size())
        throw DataError("line " + std::to_string(line) + ": bad " + what + " '" +
                        std::string(field) + "'");
    if (v < 0)
        throw DataError("line " + std::to_string(line) + ": negative " + what + " " +
                        std::to_string(v));
    return v;
}

Date parse_date_field(std::string_view field, std::size_t line) {
    auto d = Date::parse(field);
    if (!d)
        throw DataError("line " + std::to_string(line) + ": bad date '" +
                        std::string(field) + "'");
    return *d;
}

Transaction make_transaction(const std::string& investor, const std::string& security,
                             std::string_view date, std::string_view buy,
                             std::string_view sell, std::string_view reg,
                             std::size_t line) {
    Transaction t;
    t.investor_id = investor;
    t.security_id = security;
    t.trade_date = parse_date_field(date, line);
    t.buy_volume = parse_volume(buy, line, "buy_volume");
    t.sell_volume = parse_volume(sell, line, "sell_volume");
    if (t.buy_volume == 0 && t.sell_volume == 0)
        throw DataError("line " + std::to_string(line) +
                        ": transaction with zero buy and sell volume");
    try {
        t.registration = parse_registration(reg);
    } catch (const DataError& e) {
        throw DataError("line " + std::to_string(line) + ": " + e.what());
    }
    return t;
}

std::vector<Transaction> parse_transactions_jsonl(std::istream& in) {
    std::vector<Transaction> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json row;
        try {
            row = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw DataError("line " + std::to_string(line_no) + ": bad JSON: " + e.what());
        }
        auto str = [&](const char* key) -> std::string {
            if (!row.contains(key))
                throw DataError("line " + std::to_string(line_no) + ": missing field '" +
                                key + "'");
            const auto& v = row.at(key);
            if (v.is_string()) return v.get<std::string>();
            if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
            throw DataError("line " + std::to_string(line_no) + ": field '" + key +
                            "' has wrong type");
        };
        out.push_back(make_transaction(str("investor_id"), str("security_id"),
                                       str("trade_date"), str("buy_volume"),
                                       str("sell_volume"), str("registration"), line_no));
    }
    return out;
}

}  // namespace

std::vector<Transaction> parse_transactions(std::istream& in, InputFormat format) {
    if (format == InputFormat::jsonl) return parse_transactions_jsonl(in);

    CsvReader reader(in);
    reader.expect_header({"investor_id", "security_id", "trade_date", "buy_volume",
                          "sell_volume", "registration"});
    std::vector<Transaction> out;
    std::vector<std::string> f;
    while (reader.next(f)) {
        if (f.size() != 6)
            throw DataError("line " + std::to_string(reader.line_number()) + ": expected 6 fields, got " +
                            std::to_string(f.size()));
        out.push_back(make_transaction(f[0], f[1], f[2], f[3], f[4], f[5],
                                       reader.line_number()));
    }
    return out;
}

std::vector<InvestorAttributes> parse_attributes(std::istream& in) {
    CsvReader reader(in);
    reader.expect_header({"investor_id", "sector_code", "location", "gender", "birth_decade"});
    std::vector<InvestorAttributes> out;
    std::vector<std::string> f;
    while (reader.next(f)) {
        if (f.size() != 5)
            throw DataError("line " + std::to_string(reader.line_number()) + ": expected 5 fields, got " +
                            std::to_string(f.size()));
        InvestorAttributes a;
        a.investor_id = f[0];
        try {
            a.sector = parse_sector(f[1]);
            a.gender = parse_gender(f[3]);
        } catch (const DataError& e) {
            throw DataError("line " + std::to_string(reader.line_number()) + ": " + e.what());
        }
        a.location = f[2].empty() ? std::string(kNoRegion) : f[2];
        a.birth_decade = f[4].empty() ? std::string(kNoAge) : f[4];
        out.push_back(std::move(a));
    }
    return out;
}

std::vector<CalendarEntry> parse_calendar(std::istream& in) {
    CsvReader reader(in);
    reader.expect_header({"security_id", "ipo_date"});
    std::vector<CalendarEntry> out;
    std::vector<std::string> f;
    while (reader.next(f)) {
        if (f.size() != 2)
            throw DataError("line " + std::to_string(reader.line_number()) + ": expected 2 fields, got " +
                            std::to_string(f.size()));
        out.push_back({f[0], parse_date_field(f[1], reader.line_number())});
    }
    return out;
}

std::vector<Transaction> filter_universe(std::vector<Transaction> txns,
                                         bool exclude_nominee) {
    if (!exclude_nominee) return txns;
    std::erase_if(txns, [](const Transaction& t) {
        return t.registration == Registration::nominee;
    });
    return txns;
}

std::vector<DailyNetVolume> aggregate_daily(std::span<const Transaction> txns) {
    struct Key {
        std::string security;
        std::string investor;
        Date date;
        auto operator<=>(const Key&) const = default;
    };
    std::map<Key, std::pair<std::int64_t, std::int64_t>> sums;
    for (const Transaction& t : txns) {
        auto& [buy, sell] = sums[{t.security_id, t.investor_id, t.trade_date}];
        buy += t.buy_volume;
        sell += t.sell_volume;
    }
    std::vector<DailyNetVolume> out;
    out.reserve(sums.size());
    for (const auto& [key, vol] : sums) {
        out.push_back({key.investor, key.security, key.date, vol.first, vol.second});
    }
    return out;
}

SecurityCalendar build_security_calendar(std::span<const DailyNetVolume> daily,
                                         const std::string& security_id,
                                         Date ipo_date) {
    const Date span_end = ipo_date.add_years(2);
    std::set<Date> days;
    for (const DailyNetVolume& d : daily) {
        if (d.security_id != security_id) continue;
        if (d.date >= ipo_date && d.date < span_end) days.insert(d.date);
    }
    SecurityCalendar cal;
    cal.security_id = security_id;
    cal.ipo_date = ipo_date;
    cal.trading_days.assign(days.begin(), days.end());
    return cal;
}

std::pair<Window, Window> build_windows(Date ipo_date, std::optional<Date> data_end,
                                        int window_years) {
    if (window_years < 1) throw ConfigError("window_years must be >= 1");
    Window y1{ipo_date, ipo_date.add_years(window_years), 1};
    Window y2{y1.end, ipo_date.add_years(2 * window_years), 2};
    if (data_end && *data_end < y2.end.add_days(-1)) {
        throw DataError("analysis window for IPO " + ipo_date.iso() +
                        " is truncated: second year runs to " +
                        y2.end.add_days(-1).iso() + " but data ends " + data_end->iso());
    }
    return {y1, y2};
}

}  // namespace svn
