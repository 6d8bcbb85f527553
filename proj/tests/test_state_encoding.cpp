#include <doctest.h>

#include <cmath>
#include <sstream>

#include "svnet/common.hpp"
#include "svnet/state_encoding.hpp"

using namespace svn;

namespace {

SecurityCalendar daily_calendar(const std::string& sec, const std::string& ipo, int days) {
    SecurityCalendar cal;
    cal.security_id = sec;
    cal.ipo_date = *Date::parse(ipo);
    for (int i = 0; i < days; ++i) cal.trading_days.push_back(cal.ipo_date.add_days(i));
    return cal;
}

}  // namespace

TEST_CASE("scaled_net_ratio evaluates the net volume ratio") {
    CHECK(scaled_net_ratio(100, 0) == doctest::Approx(1.0));
    CHECK(scaled_net_ratio(50, 50) == doctest::Approx(0.0));
    CHECK(scaled_net_ratio(25, 75) == doctest::Approx(-0.5));
    CHECK_THROWS_AS(scaled_net_ratio(0, 0), DataError);
}

TEST_CASE("scaled_net_ratio is antisymmetric and scale invariant") {
    Rng rng(3);
    for (int i = 0; i < 200; ++i) {
        const std::int64_t a = static_cast<std::int64_t>(rng.below(1000));
        const std::int64_t b = static_cast<std::int64_t>(rng.below(1000)) + 1;
        const std::int64_t k = static_cast<std::int64_t>(rng.below(50)) + 1;
        CHECK(scaled_net_ratio(a, b) == doctest::Approx(-scaled_net_ratio(b, a)));
        CHECK(scaled_net_ratio(k * a, k * b) == doctest::Approx(scaled_net_ratio(a, b)));
    }
}

TEST_CASE("assign_state threshold rule with boundary at mixed") {
    CHECK(assign_state(0.3, 0.25) == TradingState::buy);
    CHECK(assign_state(0.25, 0.25) == TradingState::buy_sell);
    CHECK(assign_state(-0.25, 0.25) == TradingState::buy_sell);
    CHECK(assign_state(-0.26, 0.25) == TradingState::sell);
    CHECK(assign_state(0.0, 0.25) == TradingState::buy_sell);
}

TEST_CASE("every ratio maps to exactly one state") {
    for (double r = -1.0; r <= 1.0; r += 0.001) {
        int hits = 0;
        hits += assign_state(r, 0.25) == TradingState::buy;
        hits += assign_state(r, 0.25) == TradingState::sell;
        hits += assign_state(r, 0.25) == TradingState::buy_sell;
        CHECK(hits == 1);
    }
}

TEST_CASE("ThetaThreshold classifies boundaries exactly") {
    ThetaThreshold quarter(0.25);
    CHECK(quarter.exact());
    // r == theta exactly: 5 buys, 3 sells -> (5-3)/8 = 0.25 -> mixed
    CHECK(quarter.classify(5, 3) == TradingState::buy_sell);
    CHECK(quarter.classify(6, 3) == TradingState::buy);
    CHECK(quarter.classify(3, 5) == TradingState::buy_sell);
    CHECK(quarter.classify(3, 6) == TradingState::sell);

    ThetaThreshold third(1.0 / 3.0);
    CHECK(third.exact());
    CHECK(third.classify(2, 1) == TradingState::buy_sell);  // r = 1/3
    CHECK(third.classify(200001, 99999) == TradingState::buy);

    // agrees with the floating path away from boundaries
    Rng rng(17);
    for (int i = 0; i < 500; ++i) {
        const std::int64_t buy = static_cast<std::int64_t>(rng.below(10000));
        const std::int64_t sell = static_cast<std::int64_t>(rng.below(10000)) + 1;
        CHECK(quarter.classify(buy, sell) ==
              assign_state(scaled_net_ratio(buy, sell), 0.25));
    }
}

TEST_CASE("theta stability: states differ only in the threshold band") {
    const double lo = 0.01, hi = 0.25;
    Rng rng(5);
    for (int i = 0; i < 2000; ++i) {
        const std::int64_t buy = static_cast<std::int64_t>(rng.below(500));
        const std::int64_t sell = static_cast<std::int64_t>(rng.below(500)) + 1;
        const double r = scaled_net_ratio(buy, sell);
        const TradingState a = assign_state(r, lo);
        const TradingState b = assign_state(r, hi);
        if (a != b) {
            CHECK(std::abs(r) > lo);
            CHECK(std::abs(r) <= hi);
        }
    }
}

TEST_CASE("encode assigns one state per active day inside the window") {
    auto cal = daily_calendar("S", "2005-04-21", 400);
    Window y1{cal.ipo_date, cal.ipo_date.add_years(1), 1};
    std::vector<DailyNetVolume> daily = {
        {"a", "S", cal.ipo_date, 10, 0},
        {"a", "S", cal.ipo_date.add_days(1), 20, 0},
        {"a", "S", cal.ipo_date.add_days(2), 5, 0},
        {"a", "S", cal.ipo_date.add_days(380), 5, 0},  // outside Y1
        {"b", "S", cal.ipo_date.add_days(1), 60, 40},  // r = 0.2 -> mixed
    };
    StateMatrix m = encode(daily, {}, y1, cal);
    REQUIRE(m.rows.size() == 2);
    CHECK(m.rows[0].investor_id == "a");
    CHECK(m.rows[0].activity_days() == 3);
    for (const auto& [day, state] : m.rows[0].days) CHECK(state == TradingState::buy);
    CHECK(m.rows[1].days.size() == 1);
    CHECK(m.rows[1].days[0].second == TradingState::buy_sell);
}

TEST_CASE("encode of empty input is empty") {
    auto cal = daily_calendar("S", "2005-04-21", 10);
    Window y1{cal.ipo_date, cal.ipo_date.add_years(1), 1};
    CHECK(encode({}, {}, y1, cal).rows.empty());
}

TEST_CASE("filter_active keeps investors active in either window") {
    auto cal = daily_calendar("S", "2005-04-21", 500);
    Window y1{cal.ipo_date, cal.ipo_date.add_years(1), 1};
    Window y2{y1.end, cal.ipo_date.add_years(2), 2};

    auto volume_on = [&](const std::string& inv, int day) {
        return DailyNetVolume{inv, "S", cal.ipo_date.add_days(day), 1, 0};
    };
    std::vector<DailyNetVolume> daily;
    for (int d = 0; d < 6; ++d) daily.push_back(volume_on("six_y1", d));
    for (int d = 0; d < 4; ++d) daily.push_back(volume_on("four_each", d));
    for (int d = 366; d < 370; ++d) daily.push_back(volume_on("four_each", d));
    for (int d = 366; d < 372; ++d) daily.push_back(volume_on("six_y2", d));

    StateMatrix m1 = encode(daily, {}, y1, cal);
    StateMatrix m2 = encode(daily, {}, y2, cal);
    auto [f1, f2] = filter_active(m1, m2, 5);

    auto ids = [](const StateMatrix& m) {
        std::vector<std::string> out;
        for (const auto& row : m.rows) out.push_back(row.investor_id);
        return out;
    };
    CHECK(ids(f1) == std::vector<std::string>{"six_y1"});
    CHECK(ids(f2) == std::vector<std::string>{"six_y2"});
    // both matrices share the retained set; six_y2 has no Y1 activity so only
    // appears in Y2 rows, but four_each is dropped from both
    for (const auto& row : f1.rows) CHECK(row.investor_id != "four_each");
    for (const auto& row : f2.rows) CHECK(row.investor_id != "four_each");

    auto [all1, all2] = filter_active(m1, m2, 1);
    CHECK(all1.rows.size() == m1.rows.size());
    CHECK(all2.rows.size() == m2.rows.size());
}

TEST_CASE("state matrix export format") {
    auto cal = daily_calendar("S", "2005-04-21", 10);
    Window y1{cal.ipo_date, cal.ipo_date.add_years(1), 1};
    std::vector<DailyNetVolume> daily = {{"a", "S", cal.ipo_date, 0, 10}};
    StateMatrix m = encode(daily, {}, y1, cal);
    std::ostringstream out;
    write_state_matrix_csv(m, out);
    CHECK(out.str() == "investor_id,date,state\na,2005-04-21,s\n");
}
