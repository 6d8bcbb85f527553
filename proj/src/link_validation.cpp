#include "svnet/link_validation.hpp"

#include <algorithm>
#include <ostream>
#include <unordered_map>

#include "svnet/common.hpp"
#include "svnet/csv.hpp"
#include "svnet/hypergeom.hpp"

namespace svn {

std::string_view to_string(UniverseMode m) {
    return m == UniverseMode::intersection ? "intersection" : "full_window";
}

UniverseMode parse_universe_mode(std::string_view token) {
    if (token == "intersection") return UniverseMode::intersection;
    if (token == "full_window") return UniverseMode::full_window;
    throw ConfigError("unknown universe mode '" + std::string(token) + "'");
}

namespace {

// Per-row day indices split by state, plus the row's activity span.
struct RowIndex {
    std::vector<std::int32_t> by_state[kStateCount];  // sorted day indices
    std::int32_t first_day = 0;
    std::int32_t last_day = -1;
};

std::vector<RowIndex> index_rows(const StateMatrix& m) {
    std::vector<RowIndex> idx(m.rows.size());
    for (std::size_t r = 0; r < m.rows.size(); ++r) {
        const auto& days = m.rows[r].days;
        if (days.empty()) continue;
        idx[r].first_day = days.front().first;
        idx[r].last_day = days.back().first;
        for (const auto& [day, state] : days)
            idx[r].by_state[static_cast<int>(state)].push_back(day);
    }
    return idx;
}

std::int64_t count_in_range(const std::vector<std::int32_t>& sorted, std::int32_t lo,
                            std::int32_t hi) {
    auto first = std::lower_bound(sorted.begin(), sorted.end(), lo);
    auto last = std::upper_bound(sorted.begin(), sorted.end(), hi);
    return last - first;
}

}  // namespace

std::vector<PairCooccurrence> enumerate_cooccurrences(const StateMatrix& m,
                                                      UniverseMode universe) {
    const std::size_t n_rows = m.rows.size();
    const std::int64_t window_days = static_cast<std::int64_t>(m.trading_days.size());
    const std::vector<RowIndex> idx = index_rows(m);

    // day -> rows holding each state on that day
    std::vector<std::vector<std::uint32_t>> on_day[kStateCount];
    for (auto& v : on_day) v.resize(m.trading_days.size());
    for (std::size_t r = 0; r < n_rows; ++r)
        for (const auto& [day, state] : m.rows[r].days)
            on_day[static_cast<int>(state)][day].push_back(static_cast<std::uint32_t>(r));

    // joint-day counts per (pair, state)
    std::unordered_map<std::uint64_t, std::int64_t> joint[kStateCount];
    for (int s = 0; s < kStateCount; ++s) {
        for (const auto& rows : on_day[s]) {
            for (std::size_t a = 0; a < rows.size(); ++a)
                for (std::size_t b = a + 1; b < rows.size(); ++b) {
                    std::uint64_t key =
                        (static_cast<std::uint64_t>(rows[a]) << 32) | rows[b];
                    ++joint[s][key];
                }
        }
    }

    std::vector<PairCooccurrence> out;
    for (int s = 0; s < kStateCount; ++s) {
        for (const auto& [key, joint_days] : joint[s]) {
            PairCooccurrence c;
            c.row_i = static_cast<std::uint32_t>(key >> 32);
            c.row_j = static_cast<std::uint32_t>(key & 0xffffffffu);
            c.state = static_cast<TradingState>(s);
            c.joint_days = joint_days;

            const RowIndex& ri = idx[c.row_i];
            const RowIndex& rj = idx[c.row_j];
            if (universe == UniverseMode::intersection) {
                const std::int32_t lo = std::max(ri.first_day, rj.first_day);
                const std::int32_t hi = std::min(ri.last_day, rj.last_day);
                c.universe_days = hi - lo + 1;  // trading days are the day axis
                c.days_i = count_in_range(ri.by_state[s], lo, hi);
                c.days_j = count_in_range(rj.by_state[s], lo, hi);
            } else {
                c.universe_days = window_days;
                c.days_i = static_cast<std::int64_t>(ri.by_state[s].size());
                c.days_j = static_cast<std::int64_t>(rj.by_state[s].size());
            }
            out.push_back(c);
        }
    }

    std::sort(out.begin(), out.end(), [](const PairCooccurrence& a, const PairCooccurrence& b) {
        if (a.row_i != b.row_i) return a.row_i < b.row_i;
        if (a.row_j != b.row_j) return a.row_j < b.row_j;
        return a.state < b.state;
    });
    return out;
}

double cooccurrence_pvalue(const PairCooccurrence& c) {
    if (c.joint_days > std::min(c.days_i, c.days_j) || c.days_i > c.universe_days ||
        c.days_j > c.universe_days ||
        c.joint_days < std::max<std::int64_t>(0, c.days_i + c.days_j - c.universe_days))
        throw DataError("co-occurrence counts violate hypergeometric bounds");
    return hypergeom_sf(c.universe_days, c.days_i, c.days_j, c.joint_days);
}

ValidationOutcome validate_security_window(const StateMatrix& m, const FdrConfig& fdr,
                                           UniverseMode universe) {
    fdr.validate();
    const std::vector<PairCooccurrence> pairs = enumerate_cooccurrences(m, universe);

    std::vector<double> pvals;
    pvals.reserve(pairs.size());
    for (const PairCooccurrence& c : pairs) pvals.push_back(cooccurrence_pvalue(c));

    // One family per security-window spanning all three states; every
    // observed relationship counts as a test.
    FdrResult sel = fdr_select(pvals, fdr.alpha, pvals.size(), fdr.mode);

    ValidationOutcome out;
    out.report.security_id = m.security_id;
    out.report.window_label = m.window.label();
    out.report.observed = pairs.size();
    out.report.validated = sel.retained.size();
    out.report.alpha = fdr.alpha;
    out.report.threshold_slope =
        pairs.empty() ? 0.0 : fdr.alpha / static_cast<double>(pairs.size());
    out.report.sorted_pvalues = pvals;
    std::sort(out.report.sorted_pvalues.begin(), out.report.sorted_pvalues.end());

    out.links.reserve(sel.retained.size());
    for (std::size_t i : sel.retained) {
        const PairCooccurrence& c = pairs[i];
        out.links.push_back({m.rows[c.row_i].investor_id, m.rows[c.row_j].investor_id,
                             c.state, pvals[i]});
    }
    std::sort(out.links.begin(), out.links.end(),
              [](const ValidatedLink& a, const ValidatedLink& b) {
                  if (a.p_value != b.p_value) return a.p_value < b.p_value;
                  if (a.investor_i != b.investor_i) return a.investor_i < b.investor_i;
                  if (a.investor_j != b.investor_j) return a.investor_j < b.investor_j;
                  return a.state < b.state;
              });
    return out;
}

void write_links_csv(const std::vector<ValidatedLink>& links, const std::string& security_id,
                     const std::string& window_label, std::ostream& out) {
    out << "security_id,window,investor_i,investor_j,state,p_value\n";
    for (const ValidatedLink& l : links) {
        out << security_id << ',' << window_label << ',' << l.investor_i << ','
            << l.investor_j << ',' << to_string(l.state) << ',' << format_double(l.p_value)
            << '\n';
    }
}

}  // namespace svn
