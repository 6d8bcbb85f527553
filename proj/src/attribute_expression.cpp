#include "svnet/attribute_expression.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <set>
#include <unordered_map>

#include "svnet/common.hpp"
#include "svnet/csv.hpp"
#include "svnet/hypergeom.hpp"

namespace svn {

std::string_view to_string(AttrClass c) {
    switch (c) {
        case AttrClass::sector: return "sector";
        case AttrClass::location: return "location";
        case AttrClass::gender: return "gender";
        case AttrClass::decade: return "decade";
    }
    return "sector";
}

std::string_view to_string(Direction d) { return d == Direction::over ? "over" : "under"; }

double overexpression_pvalue(std::int64_t network_size, std::int64_t cluster_size,
                             std::int64_t value_count, std::int64_t cluster_value_count) {
    if (cluster_value_count > std::min(cluster_size, value_count) ||
        cluster_size > network_size || value_count > network_size)
        throw DataError("expression counts violate hypergeometric bounds");
    return hypergeom_sf(network_size, value_count, cluster_size, cluster_value_count);
}

double underexpression_pvalue(std::int64_t network_size, std::int64_t cluster_size,
                              std::int64_t value_count, std::int64_t cluster_value_count) {
    if (cluster_value_count > std::min(cluster_size, value_count) ||
        cluster_size > network_size || value_count > network_size)
        throw DataError("expression counts violate hypergeometric bounds");
    return hypergeom_cdf(network_size, value_count, cluster_size, cluster_value_count);
}

namespace {

struct ValueKey {
    AttrClass attr_class;
    std::string value;
    auto operator<=>(const ValueKey&) const = default;
};

std::vector<ValueKey> values_of(const InvestorAttributes& a) {
    return {{AttrClass::sector, std::string(to_string(a.sector))},
            {AttrClass::location, a.location},
            {AttrClass::gender, std::string(to_string(a.gender))},
            {AttrClass::decade, a.birth_decade}};
}

}  // namespace

ExpressionProfile profile_network(const ClusterSet& clusters,
                                  std::span<const InvestorAttributes> attrs,
                                  const FdrConfig& fdr) {
    fdr.validate();

    std::unordered_map<std::string_view, const InvestorAttributes*> by_id;
    for (const InvestorAttributes& a : attrs) by_id.emplace(a.investor_id, &a);

    std::int64_t network_size = 0;
    std::map<ValueKey, std::int64_t> network_counts;
    std::vector<std::map<ValueKey, std::int64_t>> cluster_counts(clusters.clusters.size());

    for (std::size_t c = 0; c < clusters.clusters.size(); ++c) {
        for (const std::string& id : clusters.clusters[c]) {
            auto it = by_id.find(id);
            if (it == by_id.end())
                throw DataError("no attribute record for investor " + id);
            ++network_size;
            for (const ValueKey& key : values_of(*it->second)) {
                ++network_counts[key];
                ++cluster_counts[c][key];
            }
        }
    }

    ExpressionProfile profile;
    profile.network_id = clusters.network_id;
    profile.alpha = fdr.alpha;
    profile.n_tests_per_direction = clusters.clusters.size() * network_counts.size();

    auto run_direction = [&](Direction dir) {
        std::vector<ExpressionTest> tests;
        tests.reserve(profile.n_tests_per_direction);
        for (std::size_t c = 0; c < clusters.clusters.size(); ++c) {
            const std::int64_t cluster_size =
                static_cast<std::int64_t>(clusters.clusters[c].size());
            for (const auto& [key, value_count] : network_counts) {
                ExpressionTest t;
                t.network_id = clusters.network_id;
                t.cluster = static_cast<std::uint32_t>(c);
                t.attr_class = key.attr_class;
                t.attr_value = key.value;
                t.direction = dir;
                t.network_size = network_size;
                t.cluster_size = cluster_size;
                t.value_count = value_count;
                auto found = cluster_counts[c].find(key);
                t.cluster_value_count = found == cluster_counts[c].end() ? 0 : found->second;
                t.p_value = dir == Direction::over
                                ? overexpression_pvalue(t.network_size, t.cluster_size,
                                                        t.value_count, t.cluster_value_count)
                                : underexpression_pvalue(t.network_size, t.cluster_size,
                                                         t.value_count, t.cluster_value_count);
                tests.push_back(std::move(t));
            }
        }
        std::vector<double> pvals;
        pvals.reserve(tests.size());
        for (const auto& t : tests) pvals.push_back(t.p_value);
        const FdrResult sel = fdr_select(pvals, fdr.alpha, tests.size(), fdr.mode);
        for (std::size_t idx : sel.retained) tests[idx].validated = true;
        return tests;
    };

    std::vector<ExpressionTest> over = run_direction(Direction::over);
    std::vector<ExpressionTest> under = run_direction(Direction::under);
    profile.tests = std::move(over);
    profile.tests.insert(profile.tests.end(), std::make_move_iterator(under.begin()),
                         std::make_move_iterator(under.end()));
    return profile;
}

namespace {

std::string security_of(const std::string& network_id) {
    auto pos = network_id.rfind(':');
    return pos == std::string::npos ? network_id : network_id.substr(0, pos);
}

std::string window_of(const std::string& network_id) {
    auto pos = network_id.rfind(':');
    return pos == std::string::npos ? std::string() : network_id.substr(pos + 1);
}

}  // namespace

std::vector<ExpressionGroup> group_expressed_clusters(
    std::span<const SimilarityResult> similarities,
    std::span<const ExpressionProfile> profiles, Direction direction) {
    // nodes: clusters with >=1 validated expression in the requested direction
    std::map<std::pair<std::string, std::uint32_t>, std::size_t> node_index;
    std::vector<std::pair<std::string, std::uint32_t>> nodes;
    std::vector<std::vector<const ExpressionTest*>> expressions;
    for (const ExpressionProfile& profile : profiles) {
        for (const ExpressionTest& t : profile.tests) {
            if (!t.validated || t.direction != direction) continue;
            auto key = std::make_pair(t.network_id, t.cluster);
            auto [it, inserted] = node_index.emplace(key, nodes.size());
            if (inserted) {
                nodes.push_back(key);
                expressions.emplace_back();
            }
            expressions[it->second].push_back(&t);
        }
    }

    std::vector<std::size_t> parent(nodes.size());
    for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = i;
    auto find = [&](std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    auto unite = [&](std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    };

    std::set<std::pair<std::size_t, std::size_t>> cross_year_links;
    for (const SimilarityResult& sim : similarities) {
        for (const OverlapTest& t : sim.tests) {
            if (!t.validated) continue;
            auto a = node_index.find({t.net_a, t.cluster_a});
            auto b = node_index.find({t.net_b, t.cluster_b});
            if (a == node_index.end() || b == node_index.end()) continue;
            unite(a->second, b->second);
            if (window_of(t.net_a) != window_of(t.net_b))
                cross_year_links.insert({std::min(a->second, b->second),
                                         std::max(a->second, b->second)});
        }
    }

    std::map<std::size_t, ExpressionGroup> by_root;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        ExpressionGroup& g = by_root[find(i)];
        g.members.push_back({nodes[i].first, nodes[i].second});
    }
    for (const auto& [a, b] : cross_year_links) {
        by_root[find(a)].spans_years = true;
    }

    std::vector<ExpressionGroup> groups;
    for (auto& [root, g] : by_root) {
        std::sort(g.members.begin(), g.members.end(),
                  [](const ExpressionGroup::Member& x, const ExpressionGroup::Member& y) {
                      if (x.network_id != y.network_id) return x.network_id < y.network_id;
                      return x.cluster < y.cluster;
                  });
        g.clusters = g.members.size();
        std::set<std::string> securities;
        std::map<ValueKey, std::pair<std::set<std::string>, std::size_t>> tally;
        for (const auto& member : g.members) {
            securities.insert(security_of(member.network_id));
            for (const ExpressionTest* t :
                 expressions[node_index.at({member.network_id, member.cluster})]) {
                auto& entry = tally[{t->attr_class, t->attr_value}];
                entry.first.insert(security_of(member.network_id));
                entry.second++;
            }
        }
        g.securities = securities.size();
        for (const auto& [key, entry] : tally) {
            g.tallies.push_back({key.attr_class, key.value, entry.first.size(), entry.second});
        }
        std::sort(g.tallies.begin(), g.tallies.end(),
                  [](const ExpressionGroup::AttributeTally& x,
                     const ExpressionGroup::AttributeTally& y) {
                      if (x.clusters != y.clusters) return x.clusters > y.clusters;
                      if (x.attr_class != y.attr_class) return x.attr_class < y.attr_class;
                      return x.attr_value < y.attr_value;
                  });
        groups.push_back(std::move(g));
    }
    std::sort(groups.begin(), groups.end(), [](const ExpressionGroup& x, const ExpressionGroup& y) {
        if (x.clusters != y.clusters) return x.clusters > y.clusters;
        return x.members.front().network_id < y.members.front().network_id;
    });
    return groups;
}

void write_expression_csv(const ExpressionProfile& profile, std::ostream& out) {
    out << "security_id,window,cluster_id,attr_class,attr_value,direction,N,N_C,N_Q,N_CQ,"
           "p_value\n";
    for (const ExpressionTest& t : profile.tests) {
        if (!t.validated) continue;
        out << security_of(t.network_id) << ',' << window_of(t.network_id) << ','
            << t.cluster << ',' << to_string(t.attr_class) << ',' << t.attr_value << ','
            << to_string(t.direction) << ',' << t.network_size << ',' << t.cluster_size
            << ',' << t.value_count << ',' << t.cluster_value_count << ','
            << format_double(t.p_value) << '\n';
    }
}

}  // namespace svn
