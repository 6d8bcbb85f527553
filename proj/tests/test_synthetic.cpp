#include <doctest.h>

#include <set>
#include <sstream>

#include "svnet/common.hpp"
#include "svnet/ingest.hpp"
#include "svnet/link_validation.hpp"
#include "svnet/synthetic.hpp"

using namespace svn;

namespace {

ScenarioConfig small_scenario() {
    ScenarioConfig cfg;
    cfg.seed = 11;
    cfg.investors = 40;
    cfg.noise_rate = 0.05;
    cfg.securities = {{"S01", *Date::parse("2005-04-21"), 250}};
    PlantedGroup g;
    g.name = "g1";
    g.members = {0, 1, 2, 3, 4};
    g.state = TradingState::buy;
    g.sync_probability = 1.0;
    g.sync_days = 10;
    g.securities = {0};
    g.windows = {1};
    cfg.groups = {g};
    return cfg;
}

std::string serialize(const SyntheticData& data) {
    std::ostringstream out;
    write_transactions_csv(data.transactions, out);
    write_attributes_csv(data.attributes, out);
    write_calendar_csv(data.calendar, out);
    write_ground_truth_json(data.truth, out);
    return out.str();
}

}  // namespace

TEST_CASE("generation is deterministic under a fixed seed") {
    auto a = generate(small_scenario());
    auto b = generate(small_scenario());
    CHECK(serialize(a) == serialize(b));

    auto cfg = small_scenario();
    cfg.seed = 12;
    CHECK(serialize(generate(cfg)) != serialize(a));
}

TEST_CASE("generated transactions satisfy the ingest invariants") {
    auto data = generate(small_scenario());
    CHECK(!data.transactions.empty());
    for (const auto& t : data.transactions) {
        CHECK(t.buy_volume >= 0);
        CHECK(t.sell_volume >= 0);
        CHECK(t.buy_volume + t.sell_volume > 0);
    }
    // round-trips through the parser
    std::ostringstream out;
    write_transactions_csv(data.transactions, out);
    std::istringstream in(out.str());
    auto parsed = parse_transactions(in);
    CHECK(parsed.size() == data.transactions.size());

    // every investor referenced has exactly one attribute record
    std::set<std::string> ids;
    for (const auto& a : data.attributes) CHECK(ids.insert(a.investor_id).second);
    for (const auto& t : data.transactions) CHECK(ids.count(t.investor_id) == 1);
}

TEST_CASE("fully synchronized group co-occurs on every shared day") {
    auto cfg = small_scenario();
    auto data = generate(cfg);

    auto daily = aggregate_daily(data.transactions);
    auto cal = build_security_calendar(daily, "S01", cfg.securities[0].ipo_date);
    auto [y1, y2] = build_windows(cfg.securities[0].ipo_date);
    StateMatrix m = encode(daily, {}, y1, cal);

    auto pairs = enumerate_cooccurrences(m);
    const auto planted = data.truth.planted_pairs("S01", 1);
    REQUIRE(planted.size() == 10);  // C(5,2)
    for (const auto& [a, b] : planted) {
        bool found = false;
        for (const auto& c : pairs) {
            if (m.rows[c.row_i].investor_id == a && m.rows[c.row_j].investor_id == b &&
                c.state == TradingState::buy && c.joint_days >= 10)
                found = true;
        }
        CHECK_MESSAGE(found, "missing planted pair ", a, "/", b);
    }
}

TEST_CASE("zero planted groups yields a pure noise dataset") {
    auto cfg = small_scenario();
    cfg.groups.clear();
    auto data = generate(cfg);
    CHECK(data.truth.clusters.empty());
    CHECK(data.truth.planted_pairs("S01", 1).empty());
    CHECK(!data.transactions.empty());
}

TEST_CASE("a group spanning securities and windows is marked everywhere") {
    auto cfg = small_scenario();
    cfg.securities.push_back({"S02", *Date::parse("2005-06-01"), 250});
    cfg.groups[0].securities = {0, 1};
    cfg.groups[0].windows = {1, 2};
    auto data = generate(cfg);
    CHECK(data.truth.clusters.size() == 4);  // 2 securities x 2 windows
    CHECK(!data.truth.planted_pairs("S01", 1).empty());
    CHECK(!data.truth.planted_pairs("S01", 2).empty());
    CHECK(!data.truth.planted_pairs("S02", 1).empty());
    CHECK(!data.truth.planted_pairs("S02", 2).empty());
}

TEST_CASE("infeasible configurations are rejected") {
    auto cfg = small_scenario();
    cfg.groups[0].sync_days = 300;  // > 250 trading days
    CHECK_THROWS_AS(generate(cfg), ConfigError);

    cfg = small_scenario();
    cfg.groups[0].members = {100};  // out of range
    CHECK_THROWS_AS(generate(cfg), ConfigError);

    cfg = small_scenario();
    cfg.noise_rate = 1.5;
    CHECK_THROWS_AS(generate(cfg), ConfigError);

    cfg = small_scenario();
    cfg.securities[0].trading_days_per_window = 300;  // more than the weekdays in a year
    CHECK_THROWS_AS(generate(cfg), ConfigError);
}

TEST_CASE("scenario JSON parsing with defaults and overrides") {
    std::istringstream in(R"({
        "seed": 5,
        "investors": 30,
        "noise_rate": 0.02,
        "securities": [{"id": "S01", "ipo_date": "2005-04-21"}],
        "planted_groups": [{
            "name": "g1", "members": [0, 1, 2], "state": "s",
            "sync_probability": 0.8, "sync_days": 12,
            "attributes": {"sector": {"FinancialInsurance": 1.0}}
        }]
    })");
    auto cfg = parse_scenario(in);
    CHECK(cfg.seed == 5);
    CHECK(cfg.securities[0].trading_days_per_window == 250);
    CHECK(cfg.groups[0].state == TradingState::sell);
    CHECK(cfg.groups[0].windows == std::vector<int>{1});
    CHECK(cfg.groups[0].attributes.sector.at("FinancialInsurance") == 1.0);

    std::istringstream bad(R"({"investors": 0})");
    CHECK_THROWS_AS(parse_scenario(bad), ConfigError);

    std::istringstream bad_seed(
        R"({"seed": "abc", "securities": [{"id": "S", "ipo_date": "2005-04-21"}]})");
    CHECK_THROWS_AS(parse_scenario(bad_seed), ConfigError);
}

TEST_CASE("planted attribute skews reach the attribute table") {
    auto cfg = small_scenario();
    cfg.groups[0].attributes.sector = {{"FinancialInsurance", 1.0}};
    auto data = generate(cfg);
    for (int m : cfg.groups[0].members) {
        const auto& a = data.attributes[static_cast<std::size_t>(m)];
        CHECK(a.sector == SectorCode::financial_insurance);
    }
    CHECK(data.truth.attribute_skews.at("g1").sector.at("FinancialInsurance") == 1.0);
}
