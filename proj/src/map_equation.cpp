#include "svnet/map_equation.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "svnet/common.hpp"

namespace svn {
namespace {

inline double plogp(double p) { return p > 0.0 ? p * std::log2(p) : 0.0; }

}  // namespace

std::vector<std::vector<std::uint32_t>> Partition::clusters() const {
    std::vector<std::vector<std::uint32_t>> out(module_count);
    for (std::uint32_t v = 0; v < module_of.size(); ++v) out[module_of[v]].push_back(v);
    return out;
}

void Partition::canonicalize() {
    std::vector<std::uint32_t> first_member(module_count, UINT32_MAX);
    for (std::uint32_t v = 0; v < module_of.size(); ++v)
        first_member[module_of[v]] = std::min(first_member[module_of[v]],
                                              static_cast<std::uint32_t>(v));
    std::vector<std::uint32_t> order(module_count);
    for (std::uint32_t m = 0; m < module_count; ++m) order[m] = m;
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        return first_member[a] < first_member[b];
    });
    std::vector<std::uint32_t> relabel(module_count);
    for (std::uint32_t rank = 0; rank < module_count; ++rank) relabel[order[rank]] = rank;
    for (auto& m : module_of) m = relabel[m];
}

double map_equation(const ValidatedNetwork& n, const std::vector<std::uint32_t>& module_of) {
    if (n.empty()) throw DataError("map_equation: empty network");
    if (module_of.size() != n.nodes.size())
        throw DataError("map_equation: module assignment size mismatch");

    std::uint32_t module_count = 0;
    for (std::uint32_t m : module_of) module_count = std::max(module_count, m + 1);

    std::vector<double> strength(n.nodes.size(), 0.0);
    std::vector<double> cut(module_count, 0.0);    // boundary weight per module
    std::vector<double> sum_p(module_count, 0.0);  // visit rate mass per module
    double total_weight = 0.0;                     // sum of edge weights

    for (const auto& e : n.edges) {
        strength[e.a] += e.weight;
        strength[e.b] += e.weight;
        total_weight += e.weight;
        if (module_of[e.a] != module_of[e.b]) {
            cut[module_of[e.a]] += e.weight;
            cut[module_of[e.b]] += e.weight;
        }
    }
    if (total_weight <= 0.0) throw DataError("map_equation: network has no edges");

    const double flow_norm = 2.0 * total_weight;
    double sum_plogp_node = 0.0;
    for (std::uint32_t v = 0; v < n.nodes.size(); ++v) {
        double p = strength[v] / flow_norm;
        sum_p[module_of[v]] += p;
        sum_plogp_node += plogp(p);
    }

    // L = plogp(q) - 2 sum_m plogp(q_m) + sum_m plogp(q_m + p_m) - sum_v plogp(p_v)
    double q_total = 0.0, sum_plogp_exit = 0.0, sum_plogp_stay = 0.0;
    for (std::uint32_t m = 0; m < module_count; ++m) {
        double q_m = cut[m] / flow_norm;
        q_total += q_m;
        sum_plogp_exit += plogp(q_m);
        sum_plogp_stay += plogp(q_m + sum_p[m]);
    }
    return plogp(q_total) - 2.0 * sum_plogp_exit + sum_plogp_stay - sum_plogp_node;
}

double one_module_codelength(const ValidatedNetwork& n) {
    return map_equation(n, std::vector<std::uint32_t>(n.nodes.size(), 0));
}

}  // namespace svn
