#include "marketdiag/synth.hpp"

#include <cmath>
#include <cstdio>

#include "marketdiag/rng.hpp"

namespace marketdiag {

namespace {

// Howard Hinnant's civil-date algorithm.
void civil_from_days(long z, int& y, int& m, int& d) {
    z += 719468;
    const long era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const long yy = static_cast<long>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp < 10 ? mp + 3 : mp - 9);
    y = static_cast<int>(yy + (m <= 2));
}

PricePanel prices_from_returns(const Eigen::MatrixXd& returns,
                               std::vector<std::string> tickers,
                               std::map<std::string, std::string> sectors) {
    PricePanel panel;
    panel.tickers = std::move(tickers);
    panel.sectors = std::move(sectors);
    panel.dates = trading_dates(static_cast<int>(returns.cols()) + 1);
    panel.prices.resize(returns.rows(), returns.cols() + 1);
    for (Eigen::Index i = 0; i < returns.rows(); ++i) {
        double log_price = 0.0;
        panel.prices(i, 0) = 100.0;
        for (Eigen::Index t = 0; t < returns.cols(); ++t) {
            log_price += returns(i, t);
            panel.prices(i, t + 1) = 100.0 * std::exp(log_price);
        }
    }
    panel.validate();
    return panel;
}

std::string label(const char* prefix, int k) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s%02d", prefix, k);
    return buf;
}

}  // namespace

std::vector<std::string> trading_dates(int count) {
    std::vector<std::string> out;
    out.reserve(static_cast<std::size_t>(count));
    long day = 10959;  // 2000-01-03, a Monday
    while (static_cast<int>(out.size()) < count) {
        const int weekday = static_cast<int>(((day % 7) + 11) % 7);  // 0 = Sunday
        if (weekday != 0 && weekday != 6) {
            int y, m, d;
            civil_from_days(day, y, m, d);
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", y, m, d);
            out.emplace_back(buf);
        }
        ++day;
    }
    return out;
}

void SynthConfig::validate() const {
    if (n_sectors < 1) throw ConfigError("SynthConfig: n_sectors must be >= 1");
    if (n_obs < 1) throw ConfigError("SynthConfig: T must be >= 1");
    if (beta_market < 0 || beta_sector < 0 || sigma_idio < 0) {
        throw ConfigError("SynthConfig: loadings must be nonnegative");
    }
    if (beta_market == 0 && beta_sector == 0 && sigma_idio == 0) {
        throw ConfigError("SynthConfig: at least one loading must be positive");
    }
    if (!equities_per_sector.empty() &&
        static_cast<int>(equities_per_sector.size()) != n_sectors) {
        throw ConfigError("SynthConfig: equities_per_sector size must equal n_sectors");
    }
    for (int c : sector_sizes()) {
        if (c < 1) throw ConfigError("SynthConfig: sector sizes must be >= 1");
    }
}

std::vector<int> SynthConfig::sector_sizes() const {
    if (!equities_per_sector.empty()) return equities_per_sector;
    return std::vector<int>(static_cast<std::size_t>(n_sectors), equities_uniform);
}

PricePanel generate_factor_market(const SynthConfig& config) {
    config.validate();
    const auto sizes = config.sector_sizes();
    int n_total = 0;
    for (int c : sizes) n_total += c;

    std::vector<std::string> tickers;
    std::map<std::string, std::string> sectors;
    std::vector<int> sector_of;
    for (int s = 0; s < config.n_sectors; ++s) {
        const std::string sec = label("SEC", s);
        for (int k = 0; k < sizes[static_cast<std::size_t>(s)]; ++k) {
            std::string tk = label("S", s) + label("E", k);
            sectors[tk] = sec;
            tickers.push_back(std::move(tk));
            sector_of.push_back(s);
        }
    }

    // Streams: 0 = market factor, 1..S = sector factors, S+1.. = idiosyncratic.
    const std::uint64_t idio_base = static_cast<std::uint64_t>(config.n_sectors) + 1;
    Eigen::MatrixXd r(n_total, config.n_obs);
    for (int t = 0; t < config.n_obs; ++t) {
        const double f = counter_gaussian(config.seed, 0, static_cast<std::uint64_t>(t));
        std::vector<double> g(static_cast<std::size_t>(config.n_sectors));
        for (int s = 0; s < config.n_sectors; ++s) {
            g[static_cast<std::size_t>(s)] =
                counter_gaussian(config.seed, 1 + static_cast<std::uint64_t>(s),
                                 static_cast<std::uint64_t>(t));
        }
        for (int i = 0; i < n_total; ++i) {
            const double eps = counter_gaussian(
                config.seed, idio_base + static_cast<std::uint64_t>(i),
                static_cast<std::uint64_t>(t));
            r(i, t) = config.beta_market * f +
                      config.beta_sector * g[static_cast<std::size_t>(sector_of[static_cast<std::size_t>(i)])] +
                      config.sigma_idio * eps;
        }
    }
    return prices_from_returns(r, std::move(tickers), std::move(sectors));
}

PricePanel generate_degenerate_market(DegenerateKind kind, int n_equities, int n_obs,
                                      std::uint64_t seed) {
    if (kind == DegenerateKind::Anti && n_equities != 2) {
        throw ConfigError("AntiRequiresTwo: kind=anti needs exactly N=2");
    }
    if (n_equities < 2) throw ConfigError("degenerate market needs N >= 2");
    if (n_obs < 1) throw ConfigError("degenerate market needs T >= 1");

    std::vector<std::string> tickers;
    std::map<std::string, std::string> sectors;
    for (int i = 0; i < n_equities; ++i) {
        std::string tk = label("EQ", i);
        sectors[tk] = "ALL";
        tickers.push_back(std::move(tk));
    }

    Eigen::MatrixXd r(n_equities, n_obs);
    for (int t = 0; t < n_obs; ++t) {
        switch (kind) {
            case DegenerateKind::Identical: {
                const double v = counter_gaussian(seed, 0, static_cast<std::uint64_t>(t));
                for (int i = 0; i < n_equities; ++i) r(i, t) = v;
                break;
            }
            case DegenerateKind::Independent:
                for (int i = 0; i < n_equities; ++i) {
                    r(i, t) = counter_gaussian(seed, static_cast<std::uint64_t>(i),
                                               static_cast<std::uint64_t>(t));
                }
                break;
            case DegenerateKind::Anti: {
                const double v = counter_gaussian(seed, 0, static_cast<std::uint64_t>(t));
                r(0, t) = v;
                r(1, t) = -v;
                break;
            }
        }
    }
    return prices_from_returns(r, std::move(tickers), std::move(sectors));
}

}  // namespace marketdiag
