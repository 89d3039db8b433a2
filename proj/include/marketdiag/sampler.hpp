#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "marketdiag/panel.hpp"
#include "marketdiag/stats.hpp"

namespace marketdiag {

struct SeedLineage {
    std::uint64_t master_seed = 0;
    int m = 0;
    int n = 0;
    int draw_index = 0;

    std::uint64_t derive() const;
};

/// One sampled (m sectors, n equities per sector) portfolio.
struct PortfolioSpec {
    int m = 0;
    int n = 0;
    std::map<std::string, std::vector<std::string>> chosen;  // sector -> n tickers
    int draw_index = 0;
    SeedLineage lineage;

    std::vector<std::string> tickers() const;
};

using SectorMap = std::map<std::string, std::vector<std::string>>;

SectorMap sector_map(const ReturnPanel& panel);

/// m sectors uniformly without replacement from those holding >= n tickers,
/// then n tickers uniformly without replacement within each. Fully determined
/// by the seed lineage.
PortfolioSpec draw_portfolio(int m, int n, const SectorMap& sectors, const SeedLineage& lineage);

/// lambda1_norm(t) for t = tau .. T of the mn x mn windowed correlation matrix.
std::vector<double> portfolio_lambda_series(const PortfolioSpec& spec, const ReturnPanel& panel,
                                            int tau);

/// Pointwise 5/50/95 percentile curves of lambda1_norm across the D draws of
/// one grid cell.
struct PercentileCurves {
    int m = 0;
    int n = 0;
    std::vector<int> t_values;
    std::vector<std::string> dates;
    std::vector<double> p05;
    std::vector<double> p50;
    std::vector<double> p95;
};

/// Rectangular (m,n) table; NaN marks infeasible/skipped cells.
struct GridTable {
    int m_lo = 0, m_hi = 0, n_lo = 0, n_hi = 0;
    std::vector<double> values;  // row-major, (m_hi-m_lo+1) x (n_hi-n_lo+1)

    static GridTable empty(int m_lo, int m_hi, int n_lo, int n_hi);
    bool contains(int m, int n) const;
    double at(int m, int n) const;
    double& at(int m, int n);
};

struct GridSummary {
    GridTable mu;
    GridTable sigma;
    int draws = 0;
    std::uint64_t master_seed = 0;
};

struct SamplingResult {
    std::vector<PercentileCurves> cells;
    GridSummary summary;
    std::vector<std::pair<int, int>> skipped;  // infeasible cells
    int tau = 0;
};

struct SampleGridConfig {
    int tau = 120;
    int m_lo = 2, m_hi = 10;
    int n_lo = 2, n_hi = 9;
    int draws = 500;
    std::uint64_t master_seed = 1;
    int threads = 1;
};

/// D seeded draws per feasible cell; per-draw lambda series; pointwise
/// percentiles; mu = mean_t p50, sigma = mean_t (p95 - p05). Deterministic for
/// a fixed config regardless of thread count.
SamplingResult sample_grid(const ReturnPanel& panel, const SampleGridConfig& config);

struct GreedyStep {
    int m = 0;
    int n = 0;
    double mu = 0.0;
};

/// From start, step to (m+1,n) or (m,n+1) within the table, taking the smaller
/// mu; ties prefer the sector step (m+1,n). Ends at `end`.
std::vector<GreedyStep> greedy_path(const GridTable& mu, std::pair<int, int> start,
                                    std::pair<int, int> end);

}  // namespace marketdiag
