#include "svnet/network.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <ostream>

#include "svnet/common.hpp"

namespace svn {

ValidatedNetwork assemble(const std::vector<ValidatedLink>& links,
                          const std::string& security_id, const std::string& window_label,
                          const std::vector<std::string>& isolated_nodes) {
    ValidatedNetwork net;
    net.security_id = security_id;
    net.window_label = window_label;

    std::map<std::string, std::uint32_t> node_index;
    for (const ValidatedLink& l : links) {
        node_index.emplace(l.investor_i, 0);
        node_index.emplace(l.investor_j, 0);
    }
    for (const std::string& id : isolated_nodes) node_index.emplace(id, 0);
    net.nodes.reserve(node_index.size());
    for (auto& [id, idx] : node_index) {
        idx = static_cast<std::uint32_t>(net.nodes.size());
        net.nodes.push_back(id);
    }

    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint8_t> masks;
    for (const ValidatedLink& l : links) {
        std::uint32_t a = node_index[l.investor_i];
        std::uint32_t b = node_index[l.investor_j];
        if (a == b) throw DataError("assemble: self link on " + l.investor_i);
        if (a > b) std::swap(a, b);
        std::uint8_t bit = static_cast<std::uint8_t>(1u << static_cast<int>(l.state));
        std::uint8_t& mask = masks[{a, b}];
        if (mask & bit)
            throw DataError("assemble: duplicate validated link " + l.investor_i + "/" +
                            l.investor_j + " state " + std::string(to_string(l.state)));
        mask |= bit;
    }

    net.edges.reserve(masks.size());
    for (const auto& [key, mask] : masks) {
        ValidatedNetwork::Edge e;
        e.a = key.first;
        e.b = key.second;
        e.state_mask = mask;
        e.weight = static_cast<std::uint8_t>(std::popcount(static_cast<unsigned>(mask)));
        net.edges.push_back(e);
    }
    return net;
}

NetworkStats network_stats(const ValidatedNetwork& n) {
    NetworkStats s;
    s.node_count = n.nodes.size();
    s.edge_count = n.edges.size();
    for (const auto& e : n.edges) s.weight_histogram[e.weight - 1]++;

    // union-find over nodes
    std::vector<std::uint32_t> parent(n.nodes.size());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::uint32_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    for (const auto& e : n.edges) {
        std::uint32_t ra = find(e.a), rb = find(e.b);
        if (ra != rb) parent[ra] = rb;
    }
    std::map<std::uint32_t, std::size_t> sizes;
    for (std::uint32_t v = 0; v < parent.size(); ++v) sizes[find(v)]++;
    for (const auto& [root, size] : sizes) s.component_sizes.push_back(size);
    std::sort(s.component_sizes.rbegin(), s.component_sizes.rend());
    return s;
}

std::string states_token(std::uint8_t state_mask) {
    std::string out;
    for (int s = 0; s < kStateCount; ++s) {
        if (state_mask & (1u << s)) {
            if (!out.empty()) out += ',';
            out += to_string(static_cast<TradingState>(s));
        }
    }
    return out;
}

void write_edge_list(const ValidatedNetwork& n, std::ostream& out) {
    for (const auto& e : n.edges) {
        out << n.nodes[e.a] << ' ' << n.nodes[e.b] << ' ' << static_cast<int>(e.weight)
            << ' ' << states_token(e.state_mask) << '\n';
    }
}

}  // namespace svn
