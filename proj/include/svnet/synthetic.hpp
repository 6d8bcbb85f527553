#ifndef SVNET_SYNTHETIC_HPP
#define SVNET_SYNTHETIC_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "svnet/ingest.hpp"
#include "svnet/state_encoding.hpp"
#include "svnet/types.hpp"

namespace svn {

// Categorical sampling table: value -> probability (normalized on use).
using Categorical = std::map<std::string, double>;

struct AttributeMixture {
    Categorical sector;
    Categorical location;
    Categorical gender;
    Categorical decade;
};

// A co-trading group planted into the noise: members trade the biased state
// on shared randomly chosen days, each member independently joining a shared
// day with `sync_probability`.
struct PlantedGroup {
    std::string name;
    std::vector<int> members;  // investor indices
    TradingState state = TradingState::buy;
    double sync_probability = 1.0;
    int sync_days = 10;
    std::vector<int> securities;  // security indices
    std::vector<int> windows;     // 1 = first year, 2 = second year
    AttributeMixture attributes;  // overrides the base mixture when non-empty
};

struct SecuritySpec {
    std::string id;
    Date ipo_date;
    int trading_days_per_window = 250;
};

struct ScenarioConfig {
    std::uint64_t seed = 0;
    int investors = 100;
    double noise_rate = 0.05;  // per investor-day trade probability
    std::vector<SecuritySpec> securities;
    std::vector<PlantedGroup> groups;
    AttributeMixture base_attributes;  // defaults filled in when empty

    void validate() const;
};

ScenarioConfig parse_scenario(std::istream& in);

struct GroundTruth {
    struct Cluster {
        std::string group_name;
        std::string security_id;
        int window = 1;
        std::vector<std::string> members;  // sorted investor ids
    };
    std::vector<Cluster> clusters;
    // group name -> planted attribute skew
    std::map<std::string, AttributeMixture> attribute_skews;

    // all unordered member pairs of every planted cluster for the given
    // security-window, deduplicated, pairs sorted
    std::vector<std::pair<std::string, std::string>> planted_pairs(
        const std::string& security_id, int window) const;
};

struct SyntheticData {
    std::vector<Transaction> transactions;
    std::vector<InvestorAttributes> attributes;
    std::vector<CalendarEntry> calendar;
    GroundTruth truth;
};

SyntheticData generate(const ScenarioConfig& cfg);

std::string investor_name(int index);

void write_transactions_csv(const std::vector<Transaction>& txns, std::ostream& out);
void write_attributes_csv(const std::vector<InvestorAttributes>& attrs, std::ostream& out);
void write_calendar_csv(const std::vector<CalendarEntry>& calendar, std::ostream& out);
void write_ground_truth_json(const GroundTruth& truth, std::ostream& out);

}  // namespace svn

#endif  // SVNET_SYNTHETIC_HPP
