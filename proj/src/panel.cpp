#include "marketdiag/panel.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace marketdiag {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) {
        out.push_back(field);
    }
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::string strip(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

bool is_iso_date(const std::string& s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
    for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u}) {
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    }
    return true;
}

std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void PricePanel::validate() const {
    const auto n = static_cast<Eigen::Index>(tickers.size());
    if (n == 0) throw DataError("EmptyPanel: no tickers");
    if (prices.rows() != n || prices.cols() != static_cast<Eigen::Index>(dates.size())) {
        throw DataError("PricePanel: price matrix shape does not match labels");
    }
    if (dates.size() < 2) throw DataError("PricePanel: need at least 2 dates");
    for (std::size_t t = 1; t < dates.size(); ++t) {
        if (!(dates[t - 1] < dates[t])) {
            throw DataError("PricePanel: dates not strictly increasing at " + dates[t]);
        }
    }
    std::set<std::string> seen;
    for (const auto& tk : tickers) {
        if (!seen.insert(tk).second) throw DataError("PricePanel: duplicate ticker " + tk);
        auto it = sectors.find(tk);
        if (it == sectors.end()) throw DataError("MissingSector: " + tk);
    }
    for (Eigen::Index i = 0; i < prices.rows(); ++i) {
        for (Eigen::Index t = 0; t < prices.cols(); ++t) {
            const double p = prices(i, t);
            if (!std::isfinite(p) || p <= 0.0) {
                throw DataError("NonPositivePrice: ticker " + tickers[i] + " date " + dates[t]);
            }
        }
    }
}

std::vector<std::string> PricePanel::sector_names() const {
    std::set<std::string> names;
    for (const auto& tk : tickers) names.insert(sectors.at(tk));
    return {names.begin(), names.end()};
}

std::vector<int> PricePanel::sector_indices(const std::string& sector) const {
    std::vector<int> idx;
    for (std::size_t i = 0; i < tickers.size(); ++i) {
        if (sectors.at(tickers[i]) == sector) idx.push_back(static_cast<int>(i));
    }
    return idx;
}

int PricePanel::index_of(const std::string& ticker) const {
    auto it = std::find(tickers.begin(), tickers.end(), ticker);
    if (it == tickers.end()) throw DataError("unknown ticker " + ticker);
    return static_cast<int>(it - tickers.begin());
}

std::vector<std::string> ReturnPanel::sector_names() const {
    std::set<std::string> names;
    for (const auto& tk : tickers) names.insert(sectors.at(tk));
    return {names.begin(), names.end()};
}

std::vector<int> ReturnPanel::sector_indices(const std::string& sector) const {
    std::vector<int> idx;
    for (std::size_t i = 0; i < tickers.size(); ++i) {
        if (sectors.at(tickers[i]) == sector) idx.push_back(static_cast<int>(i));
    }
    return idx;
}

int ReturnPanel::index_of(const std::string& ticker) const {
    auto it = std::find(tickers.begin(), tickers.end(), ticker);
    if (it == tickers.end()) throw DataError("unknown ticker " + ticker);
    return static_cast<int>(it - tickers.begin());
}

CleanResult align_and_clean(const RawPanel& raw, const CleaningPolicy& policy) {
    const auto n = raw.tickers.size();
    const auto td = raw.dates.size();
    if (raw.prices.rows() != static_cast<Eigen::Index>(n) ||
        raw.prices.cols() != static_cast<Eigen::Index>(td)) {
        throw DataError("RawPanel: shape mismatch");
    }

    std::vector<Removal> removals;
    auto missing = [&](std::size_t i, std::size_t t) { return std::isnan(raw.prices(i, t)); };

    // First/last observed date per ticker; tickers that never trade are out.
    std::vector<std::size_t> first(n, td), last(n, 0);
    std::vector<bool> keep(n, true);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t t = 0; t < td; ++t) {
            if (!missing(i, t)) {
                if (first[i] == td) first[i] = t;
                last[i] = t;
            }
        }
        if (first[i] == td) {
            keep[i] = false;
            removals.push_back({raw.tickers[i], "no data"});
        }
    }

    auto common_range = [&](std::size_t& lo, std::size_t& hi) {
        lo = 0;
        hi = td == 0 ? 0 : td - 1;
        bool any = false;
        for (std::size_t i = 0; i < n; ++i) {
            if (!keep[i]) continue;
            lo = std::max(lo, first[i]);
            hi = std::min(hi, last[i]);
            any = true;
        }
        if (!any || lo > hi) throw DataError("EmptyPanel: no tickers survive cleaning");
    };

    std::size_t lo, hi;
    common_range(lo, hi);

    // Gap and missing-fraction screen over the common range.
    for (std::size_t i = 0; i < n; ++i) {
        if (!keep[i]) continue;
        std::size_t miss = 0, run = 0, max_run = 0;
        for (std::size_t t = lo; t <= hi; ++t) {
            if (missing(i, t)) {
                ++miss;
                ++run;
                max_run = std::max(max_run, run);
            } else {
                run = 0;
            }
        }
        const std::size_t span = hi - lo + 1;
        if (max_run > static_cast<std::size_t>(policy.gap_limit)) {
            keep[i] = false;
            removals.push_back({raw.tickers[i], "TooManyGaps: gap of " + std::to_string(max_run) +
                                                   " > limit " + std::to_string(policy.gap_limit)});
        } else if (static_cast<double>(miss) > policy.drop_fraction * static_cast<double>(span)) {
            keep[i] = false;
            removals.push_back({raw.tickers[i], "missing fraction exceeds " +
                                                    std::to_string(policy.drop_fraction)});
        }
    }

    // Survivors may tighten the common range.
    common_range(lo, hi);

    PricePanel panel;
    for (std::size_t i = 0; i < n; ++i) {
        if (!keep[i]) continue;
        panel.tickers.push_back(raw.tickers[i]);
        auto it = raw.sectors.find(raw.tickers[i]);
        if (it == raw.sectors.end()) throw DataError("MissingSector: " + raw.tickers[i]);
        panel.sectors[raw.tickers[i]] = it->second;
    }
    panel.dates.assign(raw.dates.begin() + static_cast<std::ptrdiff_t>(lo),
                       raw.dates.begin() + static_cast<std::ptrdiff_t>(hi) + 1);

    panel.prices.resize(static_cast<Eigen::Index>(panel.tickers.size()),
                        static_cast<Eigen::Index>(panel.dates.size()));
    Eigen::Index row = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!keep[i]) continue;
        double prev = raw.prices(i, lo);  // defined: lo >= first[i]
        for (std::size_t t = lo; t <= hi; ++t) {
            if (!missing(i, t)) prev = raw.prices(i, t);
            panel.prices(row, t - lo) = prev;
        }
        ++row;
    }

    panel.validate();
    return {std::move(panel), std::move(removals)};
}

CleanResult load_price_panel(const std::string& price_path, const std::string& sector_path,
                             const CleaningPolicy& policy) {
    std::ifstream sf(sector_path);
    if (!sf) throw DataError("cannot open " + sector_path);
    std::map<std::string, std::string> sectors;
    std::string line;
    bool header = true;
    while (std::getline(sf, line)) {
        line = strip(line);
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (header) {
            header = false;
            if (fields.size() >= 2 && strip(fields[0]) == "ticker") continue;
        }
        if (fields.size() != 2) throw DataError("sectors file: bad row '" + line + "'");
        sectors[strip(fields[0])] = strip(fields[1]);
    }

    std::ifstream pf(price_path);
    if (!pf) throw DataError("cannot open " + price_path);
    if (!std::getline(pf, line)) throw DataError("prices file: empty");
    auto head = split_csv_line(strip(line));
    if (head.size() < 2) throw DataError("prices file: need a date column plus tickers");

    RawPanel raw;
    raw.sectors = sectors;
    for (std::size_t i = 1; i < head.size(); ++i) {
        const std::string tk = strip(head[i]);
        if (sectors.find(tk) == sectors.end()) throw DataError("MissingSector: " + tk);
        raw.tickers.push_back(tk);
    }

    std::vector<std::vector<double>> rows;
    std::size_t lineno = 1;
    while (std::getline(pf, line)) {
        ++lineno;
        line = strip(line);
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != head.size()) {
            throw DataError("prices file: row " + std::to_string(lineno) + " has " +
                            std::to_string(fields.size()) + " fields, expected " +
                            std::to_string(head.size()));
        }
        const std::string date = strip(fields[0]);
        if (!is_iso_date(date)) {
            throw DataError("UnparsableDate: row " + std::to_string(lineno) + " '" + date + "'");
        }
        std::vector<double> vals(raw.tickers.size());
        for (std::size_t i = 1; i < fields.size(); ++i) {
            const std::string cell = strip(fields[i]);
            if (cell.empty()) {
                vals[i - 1] = std::numeric_limits<double>::quiet_NaN();
                continue;
            }
            std::size_t pos = 0;
            double v = 0.0;
            try {
                v = std::stod(cell, &pos);
            } catch (const std::exception&) {
                throw DataError("prices file: bad number '" + cell + "' at row " +
                                std::to_string(lineno));
            }
            if (pos != cell.size()) {
                throw DataError("prices file: bad number '" + cell + "' at row " +
                                std::to_string(lineno));
            }
            if (v <= 0.0) {
                throw DataError("NonPositivePrice: ticker " + raw.tickers[i - 1] + " date " + date);
            }
            vals[i - 1] = v;
        }
        raw.dates.push_back(date);
        rows.push_back(std::move(vals));
    }
    for (std::size_t t = 1; t < raw.dates.size(); ++t) {
        if (!(raw.dates[t - 1] < raw.dates[t])) {
            throw DataError("prices file: dates not strictly increasing at " + raw.dates[t]);
        }
    }

    raw.prices.resize(static_cast<Eigen::Index>(raw.tickers.size()),
                      static_cast<Eigen::Index>(raw.dates.size()));
    for (std::size_t t = 0; t < rows.size(); ++t) {
        for (std::size_t i = 0; i < raw.tickers.size(); ++i) {
            raw.prices(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t)) = rows[t][i];
        }
    }

    return align_and_clean(raw, policy);
}

ReturnPanel log_returns(const PricePanel& panel) {
    panel.validate();
    ReturnPanel out;
    out.tickers = panel.tickers;
    out.sectors = panel.sectors;
    out.dates.assign(panel.dates.begin() + 1, panel.dates.end());
    const auto n = panel.prices.rows();
    const auto t_obs = panel.prices.cols() - 1;
    out.returns.resize(n, t_obs);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index t = 0; t < t_obs; ++t) {
            out.returns(i, t) = std::log(panel.prices(i, t + 1) / panel.prices(i, t));
        }
    }
    return out;
}

void write_prices_csv(const PricePanel& panel, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw DataError("cannot write " + path);
    f << "date";
    for (const auto& tk : panel.tickers) f << ',' << tk;
    f << '\n';
    for (std::size_t t = 0; t < panel.dates.size(); ++t) {
        f << panel.dates[t];
        for (Eigen::Index i = 0; i < panel.prices.rows(); ++i) {
            f << ',' << fmt_double(panel.prices(i, static_cast<Eigen::Index>(t)));
        }
        f << '\n';
    }
}

void write_sectors_csv(const PricePanel& panel, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw DataError("cannot write " + path);
    f << "ticker,sector\n";
    for (const auto& tk : panel.tickers) f << tk << ',' << panel.sectors.at(tk) << '\n';
}

}  // namespace marketdiag
