#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "marketdiag/errors.hpp"

namespace marketdiag {

/// Aligned daily close prices for N equities over T+1 dates plus a sector map.
/// Invariants: prices strictly positive, dates strictly increasing ISO-8601,
/// every ticker mapped to exactly one sector.
struct PricePanel {
    std::vector<std::string> tickers;
    std::map<std::string, std::string> sectors;  // ticker -> sector
    std::vector<std::string> dates;              // length T+1
    Eigen::MatrixXd prices;                      // N x (T+1)

    std::size_t n_equities() const { return tickers.size(); }
    std::size_t n_dates() const { return dates.size(); }

    void validate() const;

    /// Distinct sector names in sorted order.
    std::vector<std::string> sector_names() const;
    /// Row indices of the tickers belonging to one sector.
    std::vector<int> sector_indices(const std::string& sector) const;
    /// ticker -> row index.
    int index_of(const std::string& ticker) const;
};

/// N x T matrix of log returns sharing the price panel's labels.
/// dates drops the first price date: returns(i, t) covers dates[t].
struct ReturnPanel {
    std::vector<std::string> tickers;
    std::map<std::string, std::string> sectors;
    std::vector<std::string> dates;  // length T
    Eigen::MatrixXd returns;         // N x T

    std::size_t n_equities() const { return tickers.size(); }
    std::size_t n_obs() const { return dates.size(); }

    std::vector<std::string> sector_names() const;
    std::vector<int> sector_indices(const std::string& sector) const;
    int index_of(const std::string& ticker) const;
};

/// Prices as loaded from file, before alignment: NaN marks a missing cell.
struct RawPanel {
    std::vector<std::string> tickers;
    std::map<std::string, std::string> sectors;
    std::vector<std::string> dates;
    Eigen::MatrixXd prices;  // N x #dates, NaN = missing
};

struct Removal {
    std::string ticker;
    std::string reason;
};

struct CleaningPolicy {
    int gap_limit = 5;           // max consecutive missing days to forward-fill
    double drop_fraction = 0.1;  // max tolerated fraction of missing dates
};

struct CleanResult {
    PricePanel panel;
    std::vector<Removal> removals;
};

/// Restrict to the common date range, forward-fill short gaps, drop tickers
/// whose gaps exceed the policy. Idempotent on already-clean panels.
CleanResult align_and_clean(const RawPanel& raw, const CleaningPolicy& policy = {});

/// Read prices.csv (`date,TICK1,...`, empty cell = missing) and sectors.csv
/// (`ticker,sector`), then align and clean. Tickers without a sector are a
/// hard error.
CleanResult load_price_panel(const std::string& price_path, const std::string& sector_path,
                             const CleaningPolicy& policy = {});

/// r_i(t) = ln(c_i(t) / c_i(t-1)).
ReturnPanel log_returns(const PricePanel& panel);

void write_prices_csv(const PricePanel& panel, const std::string& path);
void write_sectors_csv(const PricePanel& panel, const std::string& path);

}  // namespace marketdiag
