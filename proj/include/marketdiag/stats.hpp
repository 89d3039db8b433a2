#pragma once

#include <vector>

namespace marketdiag {

/// Linear-interpolation quantile: rank = p * (D - 1), interpolated between the
/// floor/ceil order statistics. p in [0,1], input nonempty.
double percentile(std::vector<double> values, double p);

double mean(const std::vector<double>& values);

}  // namespace marketdiag
