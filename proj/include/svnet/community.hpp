#ifndef SVNET_COMMUNITY_HPP
#define SVNET_COMMUNITY_HPP

#include <cstdint>

#include "svnet/map_equation.hpp"

namespace svn {

struct DetectorConfig {
    int trials = 100;  // independent restarts, best codelength wins
    std::uint64_t seed = 0;
    int refine_rounds = 2;  // node-level fine-tuning passes after aggregation

    void validate() const;
};

// Minimizes the two-level map equation by repeated greedy node moves and
// module aggregation, restarted `trials` times from shuffled node orders.
// Deterministic for a fixed (network, config); equal-codelength trials are
// broken toward the lexicographically smallest canonical partition. Never
// returns a partition worse than the single-module baseline.
Partition detect(const ValidatedNetwork& n, const DetectorConfig& cfg);

}  // namespace svn

#endif  // SVNET_COMMUNITY_HPP
