#ifndef SVNET_FDR_HPP
#define SVNET_FDR_HPP

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace svn {

enum class FdrMode {
    step_up,  // retain every rank up to the largest k with p_(k) < alpha*k/n
    literal,  // retain exactly the ranks individually below their threshold
};

std::string_view to_string(FdrMode m);
FdrMode parse_fdr_mode(std::string_view token);

struct FdrConfig {
    double alpha = 0.05;
    FdrMode mode = FdrMode::step_up;

    void validate() const;
};

struct FdrResult {
    // indices into the caller's p-value array, in ascending (p, index) order
    std::vector<std::size_t> retained;
    std::size_t n_tests = 0;
    double alpha = 0.0;
};

// False-discovery-rate selection over sorted p-values with thresholds
// alpha * rank / n_tests. `n_tests` may exceed pvals.size() when some tests
// in the family were not materialized; it must not be smaller. Ties in p are
// broken by the caller's index order, so callers wanting a canonical result
// pass p-values in canonical key order.
FdrResult fdr_select(std::span<const double> pvals, double alpha, std::size_t n_tests,
                     FdrMode mode);

}  // namespace svn

#endif  // SVNET_FDR_HPP
