#ifndef SVNET_HYPERGEOM_HPP
#define SVNET_HYPERGEOM_HPP

#include <cstdint>

namespace svn {

// Tail probabilities of the hypergeometric distribution: X counts the overlap
// when `sample` items are drawn without replacement from a population of
// `population` items of which `tagged` are tagged.
//
// Both tails are computed by summing probability mass away from the mode and
// complementing otherwise, so the small tail is never formed by cancellation.
// Terms are anchored with log-gamma in extended precision and extended by an
// exact ratio recurrence.

// P(X >= k). Exactly 1 when k <= max(0, tagged + sample - population).
double hypergeom_sf(std::int64_t population, std::int64_t tagged, std::int64_t sample,
                    std::int64_t k);

// P(X <= k). Exactly 1 when k >= min(tagged, sample).
double hypergeom_cdf(std::int64_t population, std::int64_t tagged, std::int64_t sample,
                     std::int64_t k);

// P(X == k); 0 outside the feasible range.
double hypergeom_pmf(std::int64_t population, std::int64_t tagged, std::int64_t sample,
                     std::int64_t k);

}  // namespace svn

#endif  // SVNET_HYPERGEOM_HPP
