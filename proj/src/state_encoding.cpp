#include "svnet/state_encoding.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <set>

#include "svnet/common.hpp"
#include "svnet/csv.hpp"

namespace svn {

std::string_view to_string(TradingState s) {
    switch (s) {
        case TradingState::buy: return "b";
        case TradingState::sell: return "s";
        case TradingState::buy_sell: return "bs";
    }
    return "bs";
}

TradingState parse_state(std::string_view token) {
    if (token == "b") return TradingState::buy;
    if (token == "s") return TradingState::sell;
    if (token == "bs") return TradingState::buy_sell;
    throw DataError("unknown trading state '" + std::string(token) + "'");
}

void EncoderConfig::validate() const {
    if (!(theta > 0.0 && theta < 1.0))
        throw ConfigError("theta must be in (0, 1), got " + std::to_string(theta));
    if (min_active_days < 1)
        throw ConfigError("min_active_days must be >= 1, got " + std::to_string(min_active_days));
}

double scaled_net_ratio(std::int64_t total_buy, std::int64_t total_sell) {
    if (total_buy == 0 && total_sell == 0)
        throw DataError("scaled net ratio undefined: no traded volume");
    return static_cast<double>(total_buy - total_sell) /
           static_cast<double>(total_buy + total_sell);
}

TradingState assign_state(double r, double theta) {
    if (r > theta) return TradingState::buy;
    if (r < -theta) return TradingState::sell;
    return TradingState::buy_sell;
}

ThetaThreshold::ThetaThreshold(double theta) : theta_(theta) {
    // Best rational approximation by continued fractions, denominator <= 10^6.
    // Accepted as exact only when p/q reproduces theta to ~1 ulp.
    double x = theta;
    std::int64_t p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    for (int iter = 0; iter < 64; ++iter) {
        double a_floor = std::floor(x);
        std::int64_t a = static_cast<std::int64_t>(a_floor);
        std::int64_t p2 = a * p1 + p0;
        std::int64_t q2 = a * q1 + q0;
        if (q2 > 1000000) break;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        double frac = x - a_floor;
        if (frac < 1e-15) break;
        x = 1.0 / frac;
    }
    if (q1 > 0 && std::abs(static_cast<double>(p1) / static_cast<double>(q1) - theta) <
                      1e-12 * std::max(1.0, theta)) {
        num_ = p1;
        den_ = q1;
        exact_ = true;
    }
}

TradingState ThetaThreshold::classify(std::int64_t total_buy, std::int64_t total_sell) const {
    if (!exact_) return assign_state(scaled_net_ratio(total_buy, total_sell), theta_);
    if (total_buy == 0 && total_sell == 0)
        throw DataError("scaled net ratio undefined: no traded volume");
    // r > theta  <=>  (buy - sell) * den > num * (buy + sell)
    __int128 lhs = static_cast<__int128>(total_buy - total_sell) * den_;
    __int128 rhs = static_cast<__int128>(num_) * (total_buy + total_sell);
    if (lhs > rhs) return TradingState::buy;
    if (lhs < -rhs) return TradingState::sell;
    return TradingState::buy_sell;
}

const StateMatrix::Row* StateMatrix::find(std::string_view investor_id) const {
    auto it = std::lower_bound(rows.begin(), rows.end(), investor_id,
                               [](const Row& row, std::string_view id) {
                                   return row.investor_id < id;
                               });
    if (it == rows.end() || it->investor_id != investor_id) return nullptr;
    return &*it;
}

StateMatrix encode(std::span<const DailyNetVolume> daily, const EncoderConfig& cfg,
                   const Window& window, const SecurityCalendar& calendar) {
    cfg.validate();
    ThetaThreshold threshold(cfg.theta);

    StateMatrix m;
    m.security_id = calendar.security_id;
    m.window = window;
    for (Date d : calendar.trading_days)
        if (window.contains(d)) m.trading_days.push_back(d);

    std::map<Date, std::int32_t> day_index;
    for (std::size_t i = 0; i < m.trading_days.size(); ++i)
        day_index[m.trading_days[i]] = static_cast<std::int32_t>(i);

    std::map<std::string, std::vector<std::pair<std::int32_t, TradingState>>> by_investor;
    for (const DailyNetVolume& rec : daily) {
        if (rec.security_id != m.security_id)
            throw DataError("encode: record for security " + rec.security_id +
                            " in a batch for " + m.security_id);
        if (!window.contains(rec.date)) continue;
        auto it = day_index.find(rec.date);
        if (it == day_index.end())
            throw DataError("encode: date " + rec.date.iso() +
                            " missing from the security calendar");
        by_investor[rec.investor_id].emplace_back(
            it->second, threshold.classify(rec.total_buy, rec.total_sell));
    }

    m.rows.reserve(by_investor.size());
    for (auto& [id, days] : by_investor) {
        std::sort(days.begin(), days.end());
        m.rows.push_back({id, std::move(days)});
    }
    return m;
}

std::pair<StateMatrix, StateMatrix> filter_active(const StateMatrix& y1,
                                                  const StateMatrix& y2, int min_days) {
    if (y1.security_id != y2.security_id)
        throw DataError("filter_active: windows belong to different securities");

    std::set<std::string> keep;
    for (const auto& row : y1.rows)
        if (row.activity_days() >= min_days) keep.insert(row.investor_id);
    for (const auto& row : y2.rows)
        if (row.activity_days() >= min_days) keep.insert(row.investor_id);

    auto filtered = [&](const StateMatrix& src) {
        StateMatrix out;
        out.security_id = src.security_id;
        out.window = src.window;
        out.trading_days = src.trading_days;
        for (const auto& row : src.rows)
            if (keep.count(row.investor_id)) out.rows.push_back(row);
        return out;
    };
    return {filtered(y1), filtered(y2)};
}

void write_state_matrix_csv(const StateMatrix& m, std::ostream& out) {
    out << "investor_id,date,state\n";
    for (const auto& row : m.rows) {
        for (const auto& [day, state] : row.days) {
            out << row.investor_id << ',' << m.trading_days[day].iso() << ','
                << to_string(state) << '\n';
        }
    }
}

}  // namespace svn
