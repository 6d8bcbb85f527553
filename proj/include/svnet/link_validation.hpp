#ifndef SVNET_LINK_VALIDATION_HPP
#define SVNET_LINK_VALIDATION_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "svnet/fdr.hpp"
#include "svnet/state_encoding.hpp"

namespace svn {

// Counting universe for a pair's co-occurrence test. `intersection` clips all
// counts to the overlap of the two investors' activity spans (first to last
// active day of each, within the window); `full_window` counts over every
// trading day of the window.
enum class UniverseMode { intersection, full_window };

std::string_view to_string(UniverseMode m);
UniverseMode parse_universe_mode(std::string_view token);

// Same-state co-occurrence counts for one unordered investor pair. Mixed
// state combinations are never emitted.
struct PairCooccurrence {
    std::uint32_t row_i = 0;  // indices into StateMatrix::rows, row_i < row_j
    std::uint32_t row_j = 0;
    TradingState state = TradingState::buy;
    std::int64_t universe_days = 0;  // trading days in the counting universe
    std::int64_t days_i = 0;         // days row_i holds `state` inside the universe
    std::int64_t days_j = 0;
    std::int64_t joint_days = 0;     // same-state co-occurrence days, >= 1
};

struct ValidatedLink {
    std::string investor_i;  // investor_i < investor_j
    std::string investor_j;
    TradingState state = TradingState::buy;
    double p_value = 1.0;
};

// Plot-ready record of one validation family: enough to redraw the sorted
// p-value / threshold-line figure.
struct ValidationReport {
    std::string security_id;
    std::string window_label;
    std::size_t observed = 0;   // co-occurrence relationships (= n_tests)
    std::size_t validated = 0;
    double alpha = 0.0;
    double threshold_slope = 0.0;  // alpha / n_tests
    std::vector<double> sorted_pvalues;
};

struct ValidationOutcome {
    std::vector<ValidatedLink> links;  // sorted by (p, investor_i, investor_j, state)
    ValidationReport report;
};

// One record per unordered pair per state in {buy, sell, buy_sell} with at
// least one joint day. Output ordered by (row_i, row_j, state).
std::vector<PairCooccurrence> enumerate_cooccurrences(
    const StateMatrix& m, UniverseMode universe = UniverseMode::intersection);

// Right-tail p-value of the observed joint count under random co-occurrence.
double cooccurrence_pvalue(const PairCooccurrence& c);

// enumerate -> p-values -> one FDR family across all three states.
ValidationOutcome validate_security_window(const StateMatrix& m, const FdrConfig& fdr,
                                           UniverseMode universe = UniverseMode::intersection);

void write_links_csv(const std::vector<ValidatedLink>& links, const std::string& security_id,
                     const std::string& window_label, std::ostream& out);

}  // namespace svn

#endif  // SVNET_LINK_VALIDATION_HPP
