#include "svnet/fdr.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "svnet/common.hpp"

namespace svn {

std::string_view to_string(FdrMode m) {
    return m == FdrMode::step_up ? "step_up" : "literal";
}

FdrMode parse_fdr_mode(std::string_view token) {
    if (token == "step_up") return FdrMode::step_up;
    if (token == "literal") return FdrMode::literal;
    throw ConfigError("unknown FDR mode '" + std::string(token) + "'");
}

void FdrConfig::validate() const {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw ConfigError("alpha must be in (0, 1), got " + std::to_string(alpha));
}

FdrResult fdr_select(std::span<const double> pvals, double alpha, std::size_t n_tests,
                     FdrMode mode) {
    if (n_tests < pvals.size())
        throw ConfigError("fdr_select: n_tests (" + std::to_string(n_tests) +
                          ") smaller than the number of p-values (" +
                          std::to_string(pvals.size()) + ")");

    std::vector<std::size_t> order(pvals.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return pvals[a] < pvals[b];
    });

    FdrResult result;
    result.n_tests = n_tests;
    result.alpha = alpha;

    if (mode == FdrMode::step_up) {
        std::size_t cutoff = 0;  // number of retained ranks
        for (std::size_t r = 0; r < order.size(); ++r) {
            double threshold = alpha * static_cast<double>(r + 1) / static_cast<double>(n_tests);
            if (pvals[order[r]] < threshold) cutoff = r + 1;
        }
        result.retained.assign(order.begin(), order.begin() + cutoff);
    } else {
        for (std::size_t r = 0; r < order.size(); ++r) {
            double threshold = alpha * static_cast<double>(r + 1) / static_cast<double>(n_tests);
            if (pvals[order[r]] < threshold) result.retained.push_back(order[r]);
        }
    }
    return result;
}

}  // namespace svn
