// Small deterministic graphs shared by the map-equation and community tests.
#ifndef SVNET_TESTS_GRAPH_FIXTURES_HPP
#define SVNET_TESTS_GRAPH_FIXTURES_HPP

#include <cstdio>
#include <string>
#include <tuple>
#include <vector>

#include "svnet/network.hpp"

namespace fixtures {

using WeightedEdge = std::tuple<std::uint32_t, std::uint32_t, int>;  // a, b, weight 1..3

inline svn::ValidatedNetwork make_network(std::uint32_t n_nodes,
                                          const std::vector<WeightedEdge>& edges,
                                          const std::string& id = "S") {
    svn::ValidatedNetwork net;
    net.security_id = id;
    net.window_label = "Y1";
    for (std::uint32_t v = 0; v < n_nodes; ++v) {
        char buf[8];
        std::snprintf(buf, sizeof buf, "n%02u", v);
        net.nodes.push_back(buf);
    }
    for (const auto& [a, b, w] : edges) {
        svn::ValidatedNetwork::Edge e;
        e.a = a < b ? a : b;
        e.b = a < b ? b : a;
        e.weight = static_cast<std::uint8_t>(w);
        e.state_mask = static_cast<std::uint8_t>((1u << w) - 1);  // w distinct states
        net.edges.push_back(e);
    }
    return net;
}

inline svn::ValidatedNetwork clique(std::uint32_t n) {
    std::vector<WeightedEdge> edges;
    for (std::uint32_t a = 0; a < n; ++a)
        for (std::uint32_t b = a + 1; b < n; ++b) edges.push_back({a, b, 1});
    return make_network(n, edges);
}

// two cliques of size k joined by one bridge edge
inline svn::ValidatedNetwork barbell(std::uint32_t k) {
    std::vector<WeightedEdge> edges;
    for (std::uint32_t a = 0; a < k; ++a)
        for (std::uint32_t b = a + 1; b < k; ++b) {
            edges.push_back({a, b, 1});
            edges.push_back({k + a, k + b, 1});
        }
    edges.push_back({k - 1, k, 1});
    return make_network(2 * k, edges);
}

inline svn::ValidatedNetwork path(std::uint32_t n) {
    std::vector<WeightedEdge> edges;
    for (std::uint32_t v = 0; v + 1 < n; ++v) edges.push_back({v, v + 1, 1});
    return make_network(n, edges);
}

inline svn::ValidatedNetwork disjoint_edges(std::uint32_t pairs) {
    std::vector<WeightedEdge> edges;
    for (std::uint32_t p = 0; p < pairs; ++p) edges.push_back({2 * p, 2 * p + 1, 1});
    return make_network(2 * pairs, edges);
}

inline std::vector<svn::ValidatedNetwork> small_battery() {
    std::vector<svn::ValidatedNetwork> nets;
    for (std::uint32_t n = 3; n <= 10; ++n) nets.push_back(clique(n));
    nets.push_back(barbell(3));
    nets.push_back(barbell(4));
    nets.push_back(barbell(5));
    for (std::uint32_t n = 2; n <= 10; ++n) nets.push_back(path(n));
    for (std::uint32_t p = 1; p <= 5; ++p) nets.push_back(disjoint_edges(p));
    return nets;
}

}  // namespace fixtures

#endif  // SVNET_TESTS_GRAPH_FIXTURES_HPP
