#include "svnet/hypergeom.hpp"

#include <algorithm>
#include <cmath>

#include "svnet/common.hpp"

namespace svn {
namespace {

void check_params(std::int64_t population, std::int64_t tagged, std::int64_t sample) {
    if (population < 0 || tagged < 0 || sample < 0 || tagged > population ||
        sample > population) {
        throw DataError("hypergeometric parameters out of range: population=" +
                        std::to_string(population) + " tagged=" + std::to_string(tagged) +
                        " sample=" + std::to_string(sample));
    }
}

long double log_pmf(std::int64_t population, std::int64_t tagged, std::int64_t sample,
                    std::int64_t k) {
    auto lc = [](std::int64_t n, std::int64_t r) -> long double {
        return std::lgamma(static_cast<long double>(n + 1)) -
               std::lgamma(static_cast<long double>(r + 1)) -
               std::lgamma(static_cast<long double>(n - r + 1));
    };
    return lc(tagged, k) + lc(population - tagged, sample - k) - lc(population, sample);
}

// Sum of pmf over [k, hi] walking upward from k. Caller guarantees the terms
// are non-increasing over the range (k at or above the mode).
long double sum_upper(std::int64_t population, std::int64_t tagged, std::int64_t sample,
                      std::int64_t k, std::int64_t hi) {
    long double term = std::exp(log_pmf(population, tagged, sample, k));
    long double sum = term;
    for (std::int64_t x = k; x < hi; ++x) {
        // pmf(x+1) / pmf(x)
        long double ratio = static_cast<long double>(tagged - x) *
                            static_cast<long double>(sample - x) /
                            (static_cast<long double>(x + 1) *
                             static_cast<long double>(population - tagged - sample + x + 1));
        term *= ratio;
        sum += term;
        if (term < sum * 1e-25L) break;
    }
    return sum;
}

// Sum of pmf over [lo, k] walking downward from k (k at or below the mode).
long double sum_lower(std::int64_t population, std::int64_t tagged, std::int64_t sample,
                      std::int64_t k, std::int64_t lo) {
    long double term = std::exp(log_pmf(population, tagged, sample, k));
    long double sum = term;
    for (std::int64_t x = k; x > lo; --x) {
        // pmf(x-1) / pmf(x)
        long double ratio = static_cast<long double>(x) *
                            static_cast<long double>(population - tagged - sample + x) /
                            (static_cast<long double>(tagged - x + 1) *
                             static_cast<long double>(sample - x + 1));
        term *= ratio;
        sum += term;
        if (term < sum * 1e-25L) break;
    }
    return sum;
}

}  // namespace

double hypergeom_pmf(std::int64_t population, std::int64_t tagged, std::int64_t sample,
                     std::int64_t k) {
    check_params(population, tagged, sample);
    const std::int64_t lo = std::max<std::int64_t>(0, tagged + sample - population);
    const std::int64_t hi = std::min(tagged, sample);
    if (k < lo || k > hi) return 0.0;
    return static_cast<double>(std::exp(log_pmf(population, tagged, sample, k)));
}

double hypergeom_sf(std::int64_t population, std::int64_t tagged, std::int64_t sample,
                    std::int64_t k) {
    check_params(population, tagged, sample);
    const std::int64_t lo = std::max<std::int64_t>(0, tagged + sample - population);
    const std::int64_t hi = std::min(tagged, sample);
    if (k <= lo) return 1.0;
    if (k > hi) return 0.0;

    const std::int64_t mode = ((sample + 1) * (tagged + 1)) / (population + 2);
    if (k > mode) {
        double v = static_cast<double>(sum_upper(population, tagged, sample, k, hi));
        return std::min(v, 1.0);
    }
    // complement of the strictly-smaller left tail
    long double left = sum_lower(population, tagged, sample, k - 1, lo);
    return static_cast<double>(std::max(0.0L, 1.0L - left));
}

double hypergeom_cdf(std::int64_t population, std::int64_t tagged, std::int64_t sample,
                     std::int64_t k) {
    check_params(population, tagged, sample);
    const std::int64_t lo = std::max<std::int64_t>(0, tagged + sample - population);
    const std::int64_t hi = std::min(tagged, sample);
    if (k >= hi) return 1.0;
    if (k < lo) return 0.0;

    const std::int64_t mode = ((sample + 1) * (tagged + 1)) / (population + 2);
    if (k < mode) {
        double v = static_cast<double>(sum_lower(population, tagged, sample, k, lo));
        return std::min(v, 1.0);
    }
    long double right = sum_upper(population, tagged, sample, k + 1, hi);
    return static_cast<double>(std::max(0.0L, 1.0L - right));
}

}  // namespace svn
