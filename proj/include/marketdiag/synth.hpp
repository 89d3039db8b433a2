#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "marketdiag/panel.hpp"

namespace marketdiag {

/// Sector factor model: r_i(t) = beta_market*f(t) + beta_sector*g_{s(i)}(t)
/// + sigma_idio*eps_i(t), all factors independent standard Gaussians.
struct SynthConfig {
    int n_sectors = 4;
    std::vector<int> equities_per_sector;  // empty = uniform `equities_uniform`
    int equities_uniform = 5;
    int n_obs = 500;  // T, number of return observations
    double beta_market = 0.4;
    double beta_sector = 0.5;
    double sigma_idio = 0.77;
    std::uint64_t seed = 1;

    void validate() const;
    std::vector<int> sector_sizes() const;
};

/// Deterministic: identical config gives a bit-identical panel, independent of
/// generation order (factor draws are counter-indexed by (stream, t)).
PricePanel generate_factor_market(const SynthConfig& config);

enum class DegenerateKind { Identical, Independent, Anti };

/// identical: all series equal; independent: i.i.d. Gaussian returns;
/// anti: two series, the second the negation of the first.
PricePanel generate_degenerate_market(DegenerateKind kind, int n_equities, int n_obs,
                                      std::uint64_t seed);

/// Synthetic trading calendar: weekdays from 2000-01-03 onward, ISO-8601.
std::vector<std::string> trading_dates(int count);

}  // namespace marketdiag
