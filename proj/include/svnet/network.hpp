#ifndef SVNET_NETWORK_HPP
#define SVNET_NETWORK_HPP

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "svnet/link_validation.hpp"

namespace svn {

// Weighted multilink investor network for one security-window. The weight of
// an edge is the number of distinct validated trading states on that pair
// (1..3); nodes are exactly the investors incident to at least one edge.
struct ValidatedNetwork {
    struct Edge {
        std::uint32_t a = 0;  // node indices, a < b
        std::uint32_t b = 0;
        std::uint8_t weight = 0;
        std::uint8_t state_mask = 0;  // bit i set when state i contributed

        bool has_state(TradingState s) const {
            return state_mask & (1u << static_cast<int>(s));
        }
    };

    std::string security_id;
    std::string window_label;
    std::vector<std::string> nodes;  // sorted investor ids
    std::vector<Edge> edges;         // sorted by (a, b)

    bool empty() const { return nodes.empty(); }
};

struct NetworkStats {
    std::size_t node_count = 0;
    std::size_t edge_count = 0;
    std::array<std::size_t, 3> weight_histogram{};  // counts of w = 1, 2, 3
    std::vector<std::size_t> component_sizes;       // descending
};

// Merges per-state validated links into one weighted network. Duplicate
// (pair, state) entries are an upstream bug and raise DataError. Isolated
// active investors are excluded unless passed in `isolated_nodes`.
ValidatedNetwork assemble(const std::vector<ValidatedLink>& links,
                          const std::string& security_id, const std::string& window_label,
                          const std::vector<std::string>& isolated_nodes = {});

NetworkStats network_stats(const ValidatedNetwork& n);

// Whitespace-delimited edge list: investor_i investor_j weight states
// where states is the comma-joined list of contributing states.
void write_edge_list(const ValidatedNetwork& n, std::ostream& out);

std::string states_token(std::uint8_t state_mask);

}  // namespace svn

#endif  // SVNET_NETWORK_HPP
