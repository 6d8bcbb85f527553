#ifndef SVNET_ATTRIBUTE_EXPRESSION_HPP
#define SVNET_ATTRIBUTE_EXPRESSION_HPP

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "svnet/cluster_similarity.hpp"
#include "svnet/fdr.hpp"
#include "svnet/types.hpp"

namespace svn {

enum class AttrClass : std::uint8_t { sector, location, gender, decade };
enum class Direction : std::uint8_t { over, under };

std::string_view to_string(AttrClass c);
std::string_view to_string(Direction d);

// One hypergeometric tail test of attribute value `attr_value` inside one
// cluster against the network-wide base rate.
struct ExpressionTest {
    std::string network_id;
    std::uint32_t cluster = 0;
    AttrClass attr_class = AttrClass::sector;
    std::string attr_value;
    Direction direction = Direction::over;
    std::int64_t network_size = 0;        // N
    std::int64_t cluster_size = 0;        // cluster members
    std::int64_t value_count = 0;         // members of the network with the value
    std::int64_t cluster_value_count = 0; // members of the cluster with the value
    double p_value = 1.0;
    bool validated = false;
};

struct ExpressionProfile {
    std::string network_id;
    std::size_t n_tests_per_direction = 0;  // clusters x attribute values present
    double alpha = 0.0;
    std::vector<ExpressionTest> tests;  // over family then under family
};

// Right tail P(X >= observed): is the value over-represented in the cluster.
double overexpression_pvalue(std::int64_t network_size, std::int64_t cluster_size,
                             std::int64_t value_count, std::int64_t cluster_value_count);

// Left tail P(X <= observed): is the value under-represented.
double underexpression_pvalue(std::int64_t network_size, std::int64_t cluster_size,
                              std::int64_t value_count, std::int64_t cluster_value_count);

// Tests every (cluster, attribute value present in the network) combination
// in both directions; over and under form two FDR families of equal size.
// Every network member must have an attribute record (sentinel values count
// as first-class attribute values). Throws DataError on a missing record.
ExpressionProfile profile_network(const ClusterSet& clusters,
                                  std::span<const InvestorAttributes> attrs,
                                  const FdrConfig& fdr);

// Connected components of expressed clusters joined by validated similarity.
struct ExpressionGroup {
    struct AttributeTally {
        AttrClass attr_class = AttrClass::sector;
        std::string attr_value;
        std::size_t securities = 0;  // distinct securities expressing the value
        std::size_t clusters = 0;    // clusters expressing the value
    };
    struct Member {
        std::string network_id;
        std::uint32_t cluster = 0;
    };

    std::vector<Member> members;  // sorted by (network_id, cluster)
    std::size_t securities = 0;   // distinct securities in the group
    std::size_t clusters = 0;     // group size in clusters
    std::vector<AttributeTally> tallies;
    bool spans_years = false;  // joined by a Y1<->Y2 similarity link
};

// Groups clusters carrying >=1 validated expression in `direction` into
// components whose edges are validated similarity pairs (any mode).
// `direction`-expressed clusters without similarity edges form singleton
// groups. Output sorted by descending cluster count then first member.
std::vector<ExpressionGroup> group_expressed_clusters(
    std::span<const SimilarityResult> similarities,
    std::span<const ExpressionProfile> profiles, Direction direction);

void write_expression_csv(const ExpressionProfile& profile, std::ostream& out);

}  // namespace svn

#endif  // SVNET_ATTRIBUTE_EXPRESSION_HPP
