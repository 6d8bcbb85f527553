#ifndef SVNET_MAP_EQUATION_HPP
#define SVNET_MAP_EQUATION_HPP

#include <cstdint>
#include <vector>

#include "svnet/network.hpp"

namespace svn {

// Disjoint clusters covering the network's node set, plus the two-level
// description length of the induced random-walk encoding.
struct Partition {
    std::vector<std::uint32_t> module_of;  // node index -> module id (0-based, dense)
    std::size_t module_count = 0;
    double codelength = 0.0;  // bits per step

    std::vector<std::vector<std::uint32_t>> clusters() const;

    // Canonical form: modules relabelled in order of their smallest member.
    void canonicalize();
};

// Two-level map equation for an undirected weighted network: node visit rates
// proportional to strength, module exit rates proportional to boundary cut
// weight, no teleportation. Throws DataError on an empty network or a module
// assignment that is not a partition of the node set.
double map_equation(const ValidatedNetwork& n, const std::vector<std::uint32_t>& module_of);

// Single-module baseline: entropy of the node visit-rate distribution.
double one_module_codelength(const ValidatedNetwork& n);

}  // namespace svn

#endif  // SVNET_MAP_EQUATION_HPP
