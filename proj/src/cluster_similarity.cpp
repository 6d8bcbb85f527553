#include "svnet/cluster_similarity.hpp"

#include <algorithm>
#include <ostream>
#include <set>
#include <unordered_map>

#include "svnet/common.hpp"
#include "svnet/csv.hpp"
#include "svnet/hypergeom.hpp"

namespace svn {

std::string_view to_string(SimilarityMode m) {
    switch (m) {
        case SimilarityMode::persistence: return "persistence";
        case SimilarityMode::cross_security: return "cross_security";
        case SimilarityMode::ipo_vs_mature: return "ipo_vs_mature";
    }
    return "persistence";
}

ClusterSet make_cluster_set(const ValidatedNetwork& n, const Partition& p) {
    ClusterSet cs;
    cs.network_id = n.security_id + ":" + n.window_label;
    cs.clusters.resize(p.module_count);
    for (std::uint32_t v = 0; v < n.nodes.size(); ++v)
        cs.clusters[p.module_of[v]].push_back(n.nodes[v]);
    for (auto& members : cs.clusters) std::sort(members.begin(), members.end());
    return cs;
}

std::size_t SimilarityResult::validated_count() const {
    std::size_t n = 0;
    for (const auto& t : tests) n += t.validated;
    return n;
}

double overlap_pvalue(std::int64_t universe_size, std::int64_t size_a, std::int64_t size_b,
                      std::int64_t shared) {
    if (shared > std::min(size_a, size_b) || size_a > universe_size ||
        size_b > universe_size)
        throw DataError("overlap counts violate hypergeometric bounds");
    return hypergeom_sf(universe_size, size_a, size_b, shared);
}

namespace {

std::int64_t count_unique_members(std::span<const ClusterSet> sets) {
    std::set<std::string_view> ids;
    for (const ClusterSet& cs : sets)
        for (const auto& cluster : cs.clusters)
            for (const auto& id : cluster) ids.insert(id);
    return static_cast<std::int64_t>(ids.size());
}

// All overlapping cluster pairs between two sets, p-values attached.
void collect_pairs(const ClusterSet& a, const ClusterSet& b, std::int64_t universe,
                   std::vector<OverlapTest>& out) {
    std::unordered_map<std::string_view, std::uint32_t> member_to_cluster_b;
    for (std::uint32_t cb = 0; cb < b.clusters.size(); ++cb)
        for (const auto& id : b.clusters[cb]) member_to_cluster_b.emplace(id, cb);

    std::unordered_map<std::uint64_t, std::int64_t> shared;
    for (std::uint32_t ca = 0; ca < a.clusters.size(); ++ca) {
        for (const auto& id : a.clusters[ca]) {
            auto it = member_to_cluster_b.find(id);
            if (it == member_to_cluster_b.end()) continue;
            ++shared[(static_cast<std::uint64_t>(ca) << 32) | it->second];
        }
    }

    for (const auto& [key, n_shared] : shared) {
        OverlapTest t;
        t.net_a = a.network_id;
        t.cluster_a = static_cast<std::uint32_t>(key >> 32);
        t.net_b = b.network_id;
        t.cluster_b = static_cast<std::uint32_t>(key & 0xffffffffu);
        t.universe_size = universe;
        t.size_a = static_cast<std::int64_t>(a.clusters[t.cluster_a].size());
        t.size_b = static_cast<std::int64_t>(b.clusters[t.cluster_b].size());
        t.shared = n_shared;
        t.p_value = overlap_pvalue(t.universe_size, t.size_a, t.size_b, t.shared);
        out.push_back(std::move(t));
    }
}

SimilarityResult finalize(SimilarityMode mode, std::vector<OverlapTest> tests,
                          const FdrConfig& fdr) {
    fdr.validate();
    std::sort(tests.begin(), tests.end(), [](const OverlapTest& x, const OverlapTest& y) {
        if (x.net_a != y.net_a) return x.net_a < y.net_a;
        if (x.cluster_a != y.cluster_a) return x.cluster_a < y.cluster_a;
        if (x.net_b != y.net_b) return x.net_b < y.net_b;
        return x.cluster_b < y.cluster_b;
    });

    std::vector<double> pvals;
    pvals.reserve(tests.size());
    for (const auto& t : tests) pvals.push_back(t.p_value);
    const FdrResult sel = fdr_select(pvals, fdr.alpha, pvals.size(), fdr.mode);
    for (std::size_t idx : sel.retained) tests[idx].validated = true;

    SimilarityResult result;
    result.mode = mode;
    result.n_tests = tests.size();
    result.alpha = fdr.alpha;
    result.tests = std::move(tests);
    return result;
}

}  // namespace

SimilarityResult persistence(const ClusterSet& year1, const ClusterSet& year2,
                             const FdrConfig& fdr) {
    const ClusterSet sets[] = {year1, year2};
    const std::int64_t universe = count_unique_members(sets);
    std::vector<OverlapTest> tests;
    collect_pairs(year1, year2, universe, tests);
    return finalize(SimilarityMode::persistence, std::move(tests), fdr);
}

SimilarityResult cross_security(std::span<const ClusterSet> same_year, const FdrConfig& fdr) {
    if (same_year.size() < 2)
        throw ConfigError("cross_security needs at least two networks, got " +
                          std::to_string(same_year.size()));
    const std::int64_t universe = count_unique_members(same_year);
    std::vector<OverlapTest> tests;
    for (std::size_t i = 0; i < same_year.size(); ++i)
        for (std::size_t j = i + 1; j < same_year.size(); ++j)
            collect_pairs(same_year[i], same_year[j], universe, tests);
    return finalize(SimilarityMode::cross_security, std::move(tests), fdr);
}

SimilarityResult ipo_vs_mature(const ClusterSet& ipo, std::span<const ClusterSet> matures,
                               const FdrConfig& fdr) {
    if (matures.empty()) throw ConfigError("ipo_vs_mature needs at least one mature network");
    std::vector<ClusterSet> all(matures.begin(), matures.end());
    all.push_back(ipo);
    const std::int64_t universe = count_unique_members(all);
    std::vector<OverlapTest> tests;
    for (const ClusterSet& mature : matures) collect_pairs(ipo, mature, universe, tests);
    return finalize(SimilarityMode::ipo_vs_mature, std::move(tests), fdr);
}

std::vector<MatureOverlapSummary> summarize_vs_mature(const SimilarityResult& result,
                                                      std::span<const ClusterSet> matures) {
    std::vector<MatureOverlapSummary> out;
    for (const ClusterSet& mature : matures) {
        MatureOverlapSummary s;
        s.mature_id = mature.network_id;
        s.mature_total = mature.clusters.size();
        std::set<std::uint32_t> ipo_side, mature_side;
        for (const OverlapTest& t : result.tests) {
            if (!t.validated || t.net_b != mature.network_id) continue;
            ipo_side.insert(t.cluster_a);
            mature_side.insert(t.cluster_b);
        }
        s.ipo_clusters = ipo_side.size();
        s.mature_clusters = mature_side.size();
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<std::uint32_t> unmatched_clusters(const SimilarityResult& result,
                                              const ClusterSet& focal) {
    std::vector<bool> matched(focal.clusters.size(), false);
    for (const OverlapTest& t : result.tests) {
        if (!t.validated) continue;
        if (t.net_a == focal.network_id) matched[t.cluster_a] = true;
        if (t.net_b == focal.network_id) matched[t.cluster_b] = true;
    }
    std::vector<std::uint32_t> out;
    for (std::uint32_t c = 0; c < matched.size(); ++c)
        if (!matched[c]) out.push_back(c);
    return out;
}

void write_similarity_csv(const SimilarityResult& result, std::ostream& out) {
    out << "mode,net_a,cluster_a,net_b,cluster_b,N,n_a,n_b,n_ab,p_value,validated\n";
    for (const OverlapTest& t : result.tests) {
        out << to_string(result.mode) << ',' << t.net_a << ',' << t.cluster_a << ','
            << t.net_b << ',' << t.cluster_b << ',' << t.universe_size << ',' << t.size_a
            << ',' << t.size_b << ',' << t.shared << ',' << format_double(t.p_value) << ','
            << (t.validated ? 1 : 0) << '\n';
    }
}

}  // namespace svn
