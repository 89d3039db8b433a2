#include "marketdiag/stats.hpp"

#include <algorithm>
#include <cmath>

#include "marketdiag/errors.hpp"

namespace marketdiag {

double percentile(std::vector<double> values, double p) {
    if (values.empty()) throw ConfigError("EmptyInput: percentile of empty list");
    if (p < 0.0 || p > 1.0) throw ConfigError("percentile: p must be in [0,1]");
    std::sort(values.begin(), values.end());
    const double rank = p * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(rank));
    const auto hi = static_cast<std::size_t>(std::ceil(rank));
    if (lo == hi) return values[lo];
    const double frac = rank - static_cast<double>(lo);
    return values[lo] * (1.0 - frac) + values[hi] * frac;
}

double mean(const std::vector<double>& values) {
    if (values.empty()) throw ConfigError("EmptyInput: mean of empty list");
    double s = 0.0;
    for (double v : values) s += v;
    return s / static_cast<double>(values.size());
}

}  // namespace marketdiag
