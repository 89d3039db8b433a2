#include "marketdiag/sampler.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <thread>

#include "marketdiag/corr.hpp"
#include "marketdiag/errors.hpp"
#include "marketdiag/rng.hpp"
#include "marketdiag/spectral.hpp"

namespace marketdiag {

std::uint64_t SeedLineage::derive() const {
    return hash4(master_seed, static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(n),
                 static_cast<std::uint64_t>(draw_index));
}

std::vector<std::string> PortfolioSpec::tickers() const {
    std::vector<std::string> out;
    for (const auto& [sector, list] : chosen) {
        out.insert(out.end(), list.begin(), list.end());
    }
    return out;
}

SectorMap sector_map(const ReturnPanel& panel) {
    SectorMap map;
    for (const auto& sec : panel.sector_names()) {
        std::vector<std::string> tickers;
        for (int i : panel.sector_indices(sec)) {
            tickers.push_back(panel.tickers[static_cast<std::size_t>(i)]);
        }
        map[sec] = std::move(tickers);
    }
    return map;
}

PortfolioSpec draw_portfolio(int m, int n, const SectorMap& sectors, const SeedLineage& lineage) {
    if (m < 1 || n < 1) throw ConfigError("draw_portfolio: m and n must be >= 1");

    // Only sectors that can supply n tickers enter the uniform sector draw.
    std::vector<std::string> eligible;
    for (const auto& [sector, tickers] : sectors) {
        if (static_cast<int>(tickers.size()) >= n) eligible.push_back(sector);
    }
    if (static_cast<int>(eligible.size()) < m) {
        throw DataError("InsufficientSectors: need " + std::to_string(m) + " sectors with >= " +
                        std::to_string(n) + " tickers, have " + std::to_string(eligible.size()));
    }

    std::mt19937_64 rng(lineage.derive());
    PortfolioSpec spec;
    spec.m = m;
    spec.n = n;
    spec.draw_index = lineage.draw_index;
    spec.lineage = lineage;
    for (const auto& sector : sample_without_replacement(eligible, static_cast<std::size_t>(m), rng)) {
        spec.chosen[sector] =
            sample_without_replacement(sectors.at(sector), static_cast<std::size_t>(n), rng);
    }
    return spec;
}

std::vector<double> portfolio_lambda_series(const PortfolioSpec& spec, const ReturnPanel& panel,
                                            int tau) {
    std::vector<int> idx;
    for (const auto& tk : spec.tickers()) idx.push_back(panel.index_of(tk));

    RollingCorrelation roll(panel.returns, idx, tau);
    std::vector<double> series;
    series.reserve(static_cast<std::size_t>(static_cast<int>(panel.n_obs()) - tau + 1));
    Eigen::MatrixXd psi;
    Eigen::VectorXd warm;
    for (int t = tau; t <= static_cast<int>(panel.n_obs()); ++t) {
        roll.seek(t);
        roll.current(psi);
        PowerOptions opts;
        if (warm.size() == psi.rows()) opts.warm_start = &warm;
        EigenResult eig = leading_eigenpair(psi, opts);
        series.push_back(eig.normalized_lambda1);
        warm = std::move(eig.v1);
    }
    return series;
}

GridTable GridTable::empty(int m_lo, int m_hi, int n_lo, int n_hi) {
    GridTable t;
    t.m_lo = m_lo;
    t.m_hi = m_hi;
    t.n_lo = n_lo;
    t.n_hi = n_hi;
    t.values.assign(static_cast<std::size_t>((m_hi - m_lo + 1) * (n_hi - n_lo + 1)),
                    std::numeric_limits<double>::quiet_NaN());
    return t;
}

bool GridTable::contains(int m, int n) const {
    return m >= m_lo && m <= m_hi && n >= n_lo && n <= n_hi;
}

double GridTable::at(int m, int n) const {
    if (!contains(m, n)) throw ConfigError("GridTable: cell out of range");
    return values[static_cast<std::size_t>((m - m_lo) * (n_hi - n_lo + 1) + (n - n_lo))];
}

double& GridTable::at(int m, int n) {
    if (!contains(m, n)) throw ConfigError("GridTable: cell out of range");
    return values[static_cast<std::size_t>((m - m_lo) * (n_hi - n_lo + 1) + (n - n_lo))];
}

SamplingResult sample_grid(const ReturnPanel& panel, const SampleGridConfig& config) {
    if (config.draws < 1) throw ConfigError("sample_grid: D must be >= 1");
    if (config.m_lo > config.m_hi || config.n_lo > config.n_hi) {
        throw ConfigError("sample_grid: empty grid range");
    }
    const int tau = config.tau;
    const int t_total = static_cast<int>(panel.n_obs());
    if (tau < 2 || tau > t_total) {
        throw ConfigError("sample_grid: tau " + std::to_string(tau) + " out of range for T=" +
                          std::to_string(t_total));
    }
    const int n_windows = t_total - tau + 1;
    const auto sectors = sector_map(panel);

    struct Cell {
        int m, n;
        std::vector<std::vector<double>> draws;  // [draw][t]
    };
    std::vector<Cell> cells;
    SamplingResult result;
    result.tau = tau;
    for (int m = config.m_lo; m <= config.m_hi; ++m) {
        for (int n = config.n_lo; n <= config.n_hi; ++n) {
            int eligible = 0;
            for (const auto& [sec, tks] : sectors) {
                if (static_cast<int>(tks.size()) >= n) ++eligible;
            }
            if (eligible < m) {
                result.skipped.emplace_back(m, n);
                continue;
            }
            Cell c;
            c.m = m;
            c.n = n;
            c.draws.assign(static_cast<std::size_t>(config.draws), {});
            cells.push_back(std::move(c));
        }
    }

    // Flat task list over (cell, draw); any scheduling gives the same result
    // because each slot is written exactly once from its own seed lineage.
    struct Task {
        std::size_t cell;
        int draw;
    };
    std::vector<Task> tasks;
    for (std::size_t c = 0; c < cells.size(); ++c) {
        for (int d = 0; d < config.draws; ++d) tasks.push_back({c, d});
    }

    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::string first_error;
    std::mutex error_mutex;
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size() || failed.load()) break;
            Cell& cell = cells[tasks[i].cell];
            try {
                SeedLineage lineage{config.master_seed, cell.m, cell.n, tasks[i].draw};
                const PortfolioSpec spec = draw_portfolio(cell.m, cell.n, sectors, lineage);
                cell.draws[static_cast<std::size_t>(tasks[i].draw)] =
                    portfolio_lambda_series(spec, panel, tau);
            } catch (const Error& e) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!failed.exchange(true)) {
                    first_error = "cell (" + std::to_string(cell.m) + "," + std::to_string(cell.n) +
                                  ") draw " + std::to_string(tasks[i].draw) + ": " + e.what();
                }
            }
        }
    };

    const int n_threads = std::max(1, config.threads);
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failed.load()) throw NumericError("sample_grid: " + first_error);

    result.summary.mu = GridTable::empty(config.m_lo, config.m_hi, config.n_lo, config.n_hi);
    result.summary.sigma = GridTable::empty(config.m_lo, config.m_hi, config.n_lo, config.n_hi);
    result.summary.draws = config.draws;
    result.summary.master_seed = config.master_seed;

    std::vector<double> column(static_cast<std::size_t>(config.draws));
    for (Cell& cell : cells) {
        PercentileCurves curves;
        curves.m = cell.m;
        curves.n = cell.n;
        double mu_sum = 0.0, sigma_sum = 0.0;
        for (int w = 0; w < n_windows; ++w) {
            for (int d = 0; d < config.draws; ++d) {
                column[static_cast<std::size_t>(d)] =
                    cell.draws[static_cast<std::size_t>(d)][static_cast<std::size_t>(w)];
            }
            const double p05 = percentile(column, 0.05);
            const double p50 = percentile(column, 0.50);
            const double p95 = percentile(column, 0.95);
            curves.t_values.push_back(tau + w);
            curves.dates.push_back(panel.dates[static_cast<std::size_t>(tau + w - 1)]);
            curves.p05.push_back(p05);
            curves.p50.push_back(p50);
            curves.p95.push_back(p95);
            mu_sum += p50;
            sigma_sum += p95 - p05;
        }
        result.summary.mu.at(cell.m, cell.n) = mu_sum / n_windows;
        result.summary.sigma.at(cell.m, cell.n) = sigma_sum / n_windows;
        result.cells.push_back(std::move(curves));
    }
    return result;
}

std::vector<GreedyStep> greedy_path(const GridTable& mu, std::pair<int, int> start,
                                    std::pair<int, int> end) {
    auto value = [&](int m, int n) {
        const double v = mu.at(m, n);
        if (std::isnan(v)) {
            throw ConfigError("IncompleteTable: cell (" + std::to_string(m) + "," +
                              std::to_string(n) + ") missing");
        }
        return v;
    };
    if (!mu.contains(start.first, start.second) || !mu.contains(end.first, end.second)) {
        throw ConfigError("IncompleteTable: start/end outside the table");
    }
    if (start.first > end.first || start.second > end.second) {
        throw ConfigError("greedy_path: end must dominate start");
    }

    std::vector<GreedyStep> path;
    int m = start.first, n = start.second;
    path.push_back({m, n, value(m, n)});
    while (m != end.first || n != end.second) {
        const bool can_m = m < end.first;
        const bool can_n = n < end.second;
        bool step_m;
        if (can_m && can_n) {
            // Tie prefers the sector step.
            step_m = value(m + 1, n) <= value(m, n + 1);
        } else {
            step_m = can_m;
        }
        if (step_m) {
            ++m;
        } else {
            ++n;
        }
        path.push_back({m, n, value(m, n)});
    }
    return path;
}

}  // namespace marketdiag
