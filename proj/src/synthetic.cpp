#include "svnet/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <set>

#include <json.hpp>

#include "svnet/common.hpp"
#include "svnet/csv.hpp"
#include "svnet/ingest.hpp"

namespace svn {
namespace {

AttributeMixture default_mixture() {
    AttributeMixture m;
    m.sector = {{"Households", 0.85}, {"NonFinancial", 0.06}, {"FinancialInsurance", 0.04},
                {"GeneralGovernment", 0.02}, {"NonProfit", 0.02}, {"RestWorld", 0.01}};
    m.location = {{"Helsinki", 0.35}, {"South-West", 0.15}, {"Western-Tavastia", 0.1},
                  {"Central-Finland", 0.1}, {"Northern-Finland", 0.1},
                  {"Ostrobothnia", 0.1}, {"Rest-Uusimaa", 0.1}};
    m.gender = {{"Male", 0.55}, {"Female", 0.35}, {"NoGender", 0.1}};
    m.decade = {{"1940", 0.15}, {"1950", 0.25}, {"1960", 0.25}, {"1970", 0.15},
                {"1980", 0.1}, {"NoAge", 0.1}};
    return m;
}

void check_categorical(const Categorical& c, const std::string& what) {
    double total = 0.0;
    for (const auto& [value, p] : c) {
        if (p < 0.0) throw ConfigError(what + ": negative probability for '" + value + "'");
        total += p;
    }
    if (!c.empty() && total <= 0.0) throw ConfigError(what + ": probabilities sum to zero");
}

std::string sample(const Categorical& c, Rng& rng) {
    double total = 0.0;
    for (const auto& [value, p] : c) total += p;
    double x = rng.uniform() * total;
    for (const auto& [value, p] : c) {
        x -= p;
        if (x < 0.0) return value;
    }
    return c.rbegin()->first;
}

std::int64_t log_uniform_volume(Rng& rng) {
    // integer volumes in [1, 10^4], log-uniform
    double v = std::exp(rng.uniform() * std::log(1e4));
    return std::max<std::int64_t>(1, static_cast<std::int64_t>(v));
}

Categorical parse_categorical(const nlohmann::json& j, const std::string& what) {
    Categorical c;
    for (const auto& [key, value] : j.items()) {
        if (!value.is_number()) throw ConfigError(what + ": probability must be a number");
        c[key] = value.get<double>();
    }
    return c;
}

AttributeMixture parse_mixture(const nlohmann::json& j, const std::string& what) {
    AttributeMixture m;
    if (j.contains("sector")) m.sector = parse_categorical(j.at("sector"), what + ".sector");
    if (j.contains("location"))
        m.location = parse_categorical(j.at("location"), what + ".location");
    if (j.contains("gender")) m.gender = parse_categorical(j.at("gender"), what + ".gender");
    if (j.contains("decade")) m.decade = parse_categorical(j.at("decade"), what + ".decade");
    return m;
}

// Emit one day's trade for the given state; mixed days buy and sell the same
// volume so the ratio lands at zero regardless of magnitude.
void emit_trade(std::vector<Transaction>& out, const std::string& investor,
                const std::string& security, Date day, TradingState state, Rng& rng) {
    Transaction t;
    t.investor_id = investor;
    t.security_id = security;
    t.trade_date = day;
    t.registration = Registration::direct;
    const std::int64_t volume = log_uniform_volume(rng);
    switch (state) {
        case TradingState::buy: t.buy_volume = volume; break;
        case TradingState::sell: t.sell_volume = volume; break;
        case TradingState::buy_sell:
            t.buy_volume = volume;
            t.sell_volume = volume;
            break;
    }
    out.push_back(std::move(t));
}

}  // namespace

std::string investor_name(int index) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "I%06d", index);
    return buf;
}

void ScenarioConfig::validate() const {
    if (investors < 1) throw ConfigError("scenario: investors must be >= 1");
    if (noise_rate < 0.0 || noise_rate > 1.0)
        throw ConfigError("scenario: noise_rate must be in [0, 1]");
    if (securities.empty()) throw ConfigError("scenario: at least one security required");
    std::set<std::string> ids;
    for (const SecuritySpec& s : securities) {
        if (s.trading_days_per_window < 1)
            throw ConfigError("scenario: trading_days_per_window must be >= 1");
        if (!ids.insert(s.id).second)
            throw ConfigError("scenario: duplicate security id '" + s.id + "'");
        // a one-year window holds ~261 weekdays
        Window y1{s.ipo_date, s.ipo_date.add_years(1), 1};
        int weekdays = 0;
        for (Date d = y1.begin; d < y1.end; d = d.add_days(1)) weekdays += d.is_weekday();
        if (s.trading_days_per_window > weekdays)
            throw ConfigError("scenario: security '" + s.id + "' wants " +
                              std::to_string(s.trading_days_per_window) +
                              " trading days per window, only " + std::to_string(weekdays) +
                              " weekdays available");
    }
    std::set<std::string> names;
    for (const PlantedGroup& g : groups) {
        if (g.name.empty()) throw ConfigError("scenario: planted group without a name");
        if (!names.insert(g.name).second)
            throw ConfigError("scenario: duplicate group name '" + g.name + "'");
        if (g.members.empty())
            throw ConfigError("scenario: group '" + g.name + "' has no members");
        for (int m : g.members)
            if (m < 0 || m >= investors)
                throw ConfigError("scenario: group '" + g.name + "' member index " +
                                  std::to_string(m) + " out of range");
        if (g.sync_probability < 0.0 || g.sync_probability > 1.0)
            throw ConfigError("scenario: group '" + g.name + "' sync_probability out of [0, 1]");
        if (g.sync_days < 1)
            throw ConfigError("scenario: group '" + g.name + "' sync_days must be >= 1");
        if (g.securities.empty())
            throw ConfigError("scenario: group '" + g.name + "' spans no securities");
        for (int s : g.securities) {
            if (s < 0 || s >= static_cast<int>(securities.size()))
                throw ConfigError("scenario: group '" + g.name + "' security index " +
                                  std::to_string(s) + " out of range");
            if (g.sync_days > securities[s].trading_days_per_window)
                throw ConfigError("scenario: group '" + g.name + "' wants " +
                                  std::to_string(g.sync_days) + " sync days but security '" +
                                  securities[s].id + "' trades only " +
                                  std::to_string(securities[s].trading_days_per_window) +
                                  " days per window");
        }
        if (g.windows.empty())
            throw ConfigError("scenario: group '" + g.name + "' spans no windows");
        for (int w : g.windows)
            if (w != 1 && w != 2)
                throw ConfigError("scenario: group '" + g.name + "' window must be 1 or 2");
        check_categorical(g.attributes.sector, "group '" + g.name + "' sector");
        check_categorical(g.attributes.location, "group '" + g.name + "' location");
        check_categorical(g.attributes.gender, "group '" + g.name + "' gender");
        check_categorical(g.attributes.decade, "group '" + g.name + "' decade");
    }
    check_categorical(base_attributes.sector, "base sector");
    check_categorical(base_attributes.location, "base location");
    check_categorical(base_attributes.gender, "base gender");
    check_categorical(base_attributes.decade, "base decade");
}

ScenarioConfig parse_scenario(std::istream& in) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("scenario: bad JSON: ") + e.what());
    }
    ScenarioConfig cfg;
    try {
        if (j.contains("seed")) {
            if (!j.at("seed").is_number_unsigned() && !j.at("seed").is_number_integer())
                throw ConfigError("scenario: seed must be an integer");
            cfg.seed = j.at("seed").get<std::uint64_t>();
        }
        if (j.contains("investors")) cfg.investors = j.at("investors").get<int>();
        if (j.contains("noise_rate")) cfg.noise_rate = j.at("noise_rate").get<double>();
        for (const auto& js : j.value("securities", nlohmann::json::array())) {
            SecuritySpec s;
            s.id = js.at("id").get<std::string>();
            auto ipo = Date::parse(js.at("ipo_date").get<std::string>());
            if (!ipo) throw ConfigError("scenario: bad ipo_date for security '" + s.id + "'");
            s.ipo_date = *ipo;
            s.trading_days_per_window = js.value("trading_days_per_window", 250);
            cfg.securities.push_back(std::move(s));
        }
        for (const auto& jg : j.value("planted_groups", nlohmann::json::array())) {
            PlantedGroup g;
            g.name = jg.at("name").get<std::string>();
            g.members = jg.at("members").get<std::vector<int>>();
            g.state = parse_state(jg.value("state", "b"));
            g.sync_probability = jg.value("sync_probability", 1.0);
            g.sync_days = jg.value("sync_days", 10);
            g.securities = jg.value("securities", std::vector<int>{0});
            g.windows = jg.value("windows", std::vector<int>{1});
            if (jg.contains("attributes"))
                g.attributes = parse_mixture(jg.at("attributes"), "group '" + g.name + "'");
            cfg.groups.push_back(std::move(g));
        }
        if (j.contains("base_attributes"))
            cfg.base_attributes = parse_mixture(j.at("base_attributes"), "base_attributes");
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("scenario: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

SyntheticData generate(const ScenarioConfig& cfg) {
    cfg.validate();
    const Rng root(cfg.seed);
    SyntheticData data;

    AttributeMixture base = cfg.base_attributes;
    const AttributeMixture defaults = default_mixture();
    if (base.sector.empty()) base.sector = defaults.sector;
    if (base.location.empty()) base.location = defaults.location;
    if (base.gender.empty()) base.gender = defaults.gender;
    if (base.decade.empty()) base.decade = defaults.decade;

    // attributes: planted skews override the base mixture per class
    Rng attr_rng = root.fork(0xa77c);
    std::vector<const PlantedGroup*> group_of(cfg.investors, nullptr);
    for (const PlantedGroup& g : cfg.groups)
        for (int m : g.members)
            if (!group_of[m]) group_of[m] = &g;
    for (int i = 0; i < cfg.investors; ++i) {
        const AttributeMixture* mix = &base;
        AttributeMixture merged;
        if (group_of[i]) {
            merged = group_of[i]->attributes;
            if (merged.sector.empty()) merged.sector = base.sector;
            if (merged.location.empty()) merged.location = base.location;
            if (merged.gender.empty()) merged.gender = base.gender;
            if (merged.decade.empty()) merged.decade = base.decade;
            mix = &merged;
        }
        InvestorAttributes a;
        a.investor_id = investor_name(i);
        a.sector = parse_sector(sample(mix->sector, attr_rng));
        a.location = sample(mix->location, attr_rng);
        a.gender = parse_gender(sample(mix->gender, attr_rng));
        a.birth_decade = sample(mix->decade, attr_rng);
        data.attributes.push_back(std::move(a));
    }

    for (std::size_t sec = 0; sec < cfg.securities.size(); ++sec) {
        const SecuritySpec& spec = cfg.securities[sec];
        data.calendar.push_back({spec.id, spec.ipo_date});
        auto [y1, y2] = build_windows(spec.ipo_date);
        const Window windows[2] = {y1, y2};

        for (int w = 0; w < 2; ++w) {
            const Window& window = windows[w];
            Rng rng = root.fork(1 + sec * 2 + static_cast<std::size_t>(w));

            // first trading_days_per_window weekdays of the window
            std::vector<Date> days;
            for (Date d = window.begin;
                 d < window.end && static_cast<int>(days.size()) < spec.trading_days_per_window;
                 d = d.add_days(1)) {
                if (d.is_weekday()) days.push_back(d);
            }

            // planted groups first: pick shared days, mark members' sync days
            // so noise never overwrites a planted state
            std::vector<std::set<std::int32_t>> reserved(cfg.investors);
            for (const PlantedGroup& g : cfg.groups) {
                const bool spans_security =
                    std::find(g.securities.begin(), g.securities.end(),
                              static_cast<int>(sec)) != g.securities.end();
                const bool spans_window = std::find(g.windows.begin(), g.windows.end(),
                                                    window.index) != g.windows.end();
                if (!spans_security || !spans_window) continue;

                std::vector<std::int32_t> pool(days.size());
                for (std::size_t d = 0; d < pool.size(); ++d)
                    pool[d] = static_cast<std::int32_t>(d);
                rng.shuffle(pool);
                pool.resize(static_cast<std::size_t>(g.sync_days));
                std::sort(pool.begin(), pool.end());

                for (int m : g.members) {
                    for (std::int32_t d : pool) {
                        if (!rng.bernoulli(g.sync_probability)) continue;
                        reserved[m].insert(d);
                        emit_trade(data.transactions, investor_name(m), spec.id, days[d],
                                   g.state, rng);
                    }
                }
                GroundTruth::Cluster cluster;
                cluster.group_name = g.name;
                cluster.security_id = spec.id;
                cluster.window = window.index;
                for (int m : g.members) cluster.members.push_back(investor_name(m));
                std::sort(cluster.members.begin(), cluster.members.end());
                data.truth.clusters.push_back(std::move(cluster));
            }

            // independent noise traders
            for (int i = 0; i < cfg.investors; ++i) {
                for (std::size_t d = 0; d < days.size(); ++d) {
                    if (!rng.bernoulli(cfg.noise_rate)) continue;
                    if (reserved[i].count(static_cast<std::int32_t>(d))) continue;
                    const TradingState state =
                        static_cast<TradingState>(rng.below(kStateCount));
                    emit_trade(data.transactions, investor_name(i), spec.id, days[d], state,
                               rng);
                }
            }
        }
    }

    for (const PlantedGroup& g : cfg.groups)
        data.truth.attribute_skews[g.name] = g.attributes;
    return data;
}

std::vector<std::pair<std::string, std::string>> GroundTruth::planted_pairs(
    const std::string& security_id, int window) const {
    std::set<std::pair<std::string, std::string>> pairs;
    for (const Cluster& c : clusters) {
        if (c.security_id != security_id || c.window != window) continue;
        for (std::size_t i = 0; i < c.members.size(); ++i)
            for (std::size_t j = i + 1; j < c.members.size(); ++j)
                pairs.insert({c.members[i], c.members[j]});
    }
    return {pairs.begin(), pairs.end()};
}

void write_transactions_csv(const std::vector<Transaction>& txns, std::ostream& out) {
    out << "investor_id,security_id,trade_date,buy_volume,sell_volume,registration\n";
    for (const Transaction& t : txns) {
        out << t.investor_id << ',' << t.security_id << ',' << t.trade_date.iso() << ','
            << t.buy_volume << ',' << t.sell_volume << ',' << to_string(t.registration)
            << '\n';
    }
}

void write_attributes_csv(const std::vector<InvestorAttributes>& attrs, std::ostream& out) {
    out << "investor_id,sector_code,location,gender,birth_decade\n";
    for (const InvestorAttributes& a : attrs) {
        out << a.investor_id << ',' << to_string(a.sector) << ',' << a.location << ','
            << to_string(a.gender) << ',' << a.birth_decade << '\n';
    }
}

void write_calendar_csv(const std::vector<CalendarEntry>& calendar, std::ostream& out) {
    out << "security_id,ipo_date\n";
    for (const CalendarEntry& c : calendar)
        out << c.security_id << ',' << c.ipo_date.iso() << '\n';
}

void write_ground_truth_json(const GroundTruth& truth, std::ostream& out) {
    nlohmann::ordered_json j;
    j["clusters"] = nlohmann::ordered_json::array();
    std::set<std::pair<std::string, int>> keys;
    for (const auto& c : truth.clusters) {
        nlohmann::ordered_json jc;
        jc["group"] = c.group_name;
        jc["security_id"] = c.security_id;
        jc["window"] = "Y" + std::to_string(c.window);
        jc["members"] = c.members;
        j["clusters"].push_back(std::move(jc));
        keys.insert({c.security_id, c.window});
    }
    j["pairs"] = nlohmann::ordered_json::array();
    for (const auto& [security, window] : keys) {
        for (const auto& [a, b] : truth.planted_pairs(security, window)) {
            j["pairs"].push_back(nlohmann::ordered_json{
                {"security_id", security}, {"window", "Y" + std::to_string(window)},
                {"investor_i", a}, {"investor_j", b}});
        }
    }
    j["attribute_skews"] = nlohmann::ordered_json::object();
    for (const auto& [name, mix] : truth.attribute_skews) {
        nlohmann::ordered_json jm;
        if (!mix.sector.empty()) jm["sector"] = mix.sector;
        if (!mix.location.empty()) jm["location"] = mix.location;
        if (!mix.gender.empty()) jm["gender"] = mix.gender;
        if (!mix.decade.empty()) jm["decade"] = mix.decade;
        j["attribute_skews"][name] = std::move(jm);
    }
    out << j.dump(2) << '\n';
}

}  // namespace svn
