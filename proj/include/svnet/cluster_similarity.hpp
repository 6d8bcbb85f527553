#ifndef SVNET_CLUSTER_SIMILARITY_HPP
#define SVNET_CLUSTER_SIMILARITY_HPP

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "svnet/fdr.hpp"
#include "svnet/map_equation.hpp"

namespace svn {

// A partition flattened to member id lists, the unit the similarity tests
// operate on. `network_id` names the owning security-window (or any caller
// chosen label unique within one comparison).
struct ClusterSet {
    std::string network_id;
    std::vector<std::vector<std::string>> clusters;  // members, each sorted
};

ClusterSet make_cluster_set(const ValidatedNetwork& n, const Partition& p);

enum class SimilarityMode { persistence, cross_security, ipo_vs_mature };

std::string_view to_string(SimilarityMode m);

// One pairwise cluster-overlap test under the hypergeometric null of random
// membership from a shared universe of `universe_size` investors.
struct OverlapTest {
    std::string net_a;
    std::uint32_t cluster_a = 0;
    std::string net_b;
    std::uint32_t cluster_b = 0;
    std::int64_t universe_size = 0;  // N
    std::int64_t size_a = 0;
    std::int64_t size_b = 0;
    std::int64_t shared = 0;  // >= 1, only overlapping pairs are tested
    double p_value = 1.0;
    bool validated = false;
};

struct SimilarityResult {
    SimilarityMode mode = SimilarityMode::persistence;
    std::size_t n_tests = 0;  // FDR family size == tests.size()
    double alpha = 0.0;
    std::vector<OverlapTest> tests;  // sorted by (net_a, cluster_a, net_b, cluster_b)

    std::size_t validated_count() const;
};

// Right-tail overlap p-value, sharing the link-validation numeric kernel.
double overlap_pvalue(std::int64_t universe_size, std::int64_t size_a, std::int64_t size_b,
                      std::int64_t shared);

// Persistence in time: every Y1 x Y2 cluster pair of one security that
// shares at least one investor, one FDR family, universe = unique investors
// over the two networks.
SimilarityResult persistence(const ClusterSet& year1, const ClusterSet& year2,
                             const FdrConfig& fdr);

// Same-year overlap across securities; only inter-security pairs are tested;
// universe = unique investors across all supplied networks.
SimilarityResult cross_security(std::span<const ClusterSet> same_year, const FdrConfig& fdr);

// IPO clusters vs the clusters of all supplied mature securities, one joint
// FDR family across every mature security.
SimilarityResult ipo_vs_mature(const ClusterSet& ipo, std::span<const ClusterSet> matures,
                               const FdrConfig& fdr);

// Per-mature-security roll-up of an ipo_vs_mature result: A validated
// IPO-side clusters, (B) validated mature-side clusters, {C} total clusters
// of the mature security.
struct MatureOverlapSummary {
    std::string mature_id;
    std::size_t ipo_clusters = 0;     // A
    std::size_t mature_clusters = 0;  // B
    std::size_t mature_total = 0;     // C
};

std::vector<MatureOverlapSummary> summarize_vs_mature(const SimilarityResult& result,
                                                      std::span<const ClusterSet> matures);

// Indices of `focal`'s clusters with no validated pair in `result`
// (asset-specific clusters in a cross-security run, or the non-overlapping
// side of an ipo_vs_mature run).
std::vector<std::uint32_t> unmatched_clusters(const SimilarityResult& result,
                                              const ClusterSet& focal);

void write_similarity_csv(const SimilarityResult& result, std::ostream& out);

}  // namespace svn

#endif  // SVNET_CLUSTER_SIMILARITY_HPP
