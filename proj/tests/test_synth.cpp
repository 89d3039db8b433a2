#include <doctest.h>

#include <cmath>

#include "marketdiag/corr.hpp"
#include "marketdiag/panel.hpp"
#include "marketdiag/synth.hpp"

using namespace marketdiag;

TEST_CASE("same config gives a bit-identical panel") {
    SynthConfig cfg;
    cfg.n_sectors = 3;
    cfg.equities_uniform = 4;
    cfg.n_obs = 200;
    cfg.seed = 42;
    const PricePanel a = generate_factor_market(cfg);
    const PricePanel b = generate_factor_market(cfg);
    CHECK(a.tickers == b.tickers);
    CHECK(a.dates == b.dates);
    CHECK(a.prices == b.prices);  // exact

    cfg.seed = 43;
    const PricePanel c = generate_factor_market(cfg);
    CHECK(a.prices != c.prices);
}

TEST_CASE("pure market factor makes all series identical") {
    SynthConfig cfg;
    cfg.n_sectors = 2;
    cfg.equities_uniform = 3;
    cfg.n_obs = 50;
    cfg.beta_market = 1.0;
    cfg.beta_sector = 0.0;
    cfg.sigma_idio = 0.0;
    const PricePanel panel = generate_factor_market(cfg);
    for (Eigen::Index i = 1; i < panel.prices.rows(); ++i) {
        CHECK(panel.prices.row(i) == panel.prices.row(0));
    }
}

TEST_CASE("independent equities stay inside the Fisher bound") {
    SynthConfig cfg;
    cfg.n_sectors = 2;
    cfg.equities_uniform = 3;
    cfg.n_obs = 2000;
    cfg.beta_market = 0.0;
    cfg.beta_sector = 0.0;
    cfg.sigma_idio = 1.0;
    cfg.seed = 7;
    const ReturnPanel r = log_returns(generate_factor_market(cfg));
    const int tau = 2000;
    const CorrMatrix psi = window_correlation(r, {tau, tau}, r.tickers);
    const double bound = 4.0 / std::sqrt(static_cast<double>(tau));
    for (Eigen::Index i = 0; i < psi.size(); ++i) {
        for (Eigen::Index j = 0; j < i; ++j) {
            CHECK(std::abs(psi.entries(i, j)) <= bound);
        }
    }
}

TEST_CASE("factor loadings produce the expected population correlations") {
    SynthConfig cfg;
    cfg.n_sectors = 3;
    cfg.equities_uniform = 4;
    cfg.n_obs = 20000;
    cfg.beta_market = 0.5;
    cfg.beta_sector = 0.5;
    cfg.sigma_idio = 0.707;
    cfg.seed = 11;
    const ReturnPanel r = log_returns(generate_factor_market(cfg));
    const CorrMatrix psi = window_correlation(r, {cfg.n_obs, cfg.n_obs}, r.tickers);

    const double var = 0.25 + 0.25 + 0.707 * 0.707;
    const double rho_within = 0.5 / var;
    const double rho_cross = 0.25 / var;
    const double tol = 5.0 / std::sqrt(static_cast<double>(cfg.n_obs));
    for (Eigen::Index i = 0; i < psi.size(); ++i) {
        for (Eigen::Index j = 0; j < i; ++j) {
            const bool same = r.sectors.at(r.tickers[static_cast<std::size_t>(i)]) ==
                              r.sectors.at(r.tickers[static_cast<std::size_t>(j)]);
            CHECK(std::abs(psi.entries(i, j) - (same ? rho_within : rho_cross)) <= tol);
        }
    }
}

TEST_CASE("within-sector correlation exceeds cross-sector when beta_sector > 0") {
    SynthConfig cfg;
    cfg.n_sectors = 4;
    cfg.equities_uniform = 5;
    cfg.n_obs = 5000;
    cfg.beta_market = 0.3;
    cfg.beta_sector = 0.4;
    cfg.sigma_idio = 0.8;
    cfg.seed = 3;
    const ReturnPanel r = log_returns(generate_factor_market(cfg));
    const CorrMatrix psi = window_correlation(r, {cfg.n_obs, cfg.n_obs}, r.tickers);

    double within = 0.0, cross = 0.0;
    int n_within = 0, n_cross = 0;
    for (Eigen::Index i = 0; i < psi.size(); ++i) {
        for (Eigen::Index j = 0; j < i; ++j) {
            const bool same = r.sectors.at(r.tickers[static_cast<std::size_t>(i)]) ==
                              r.sectors.at(r.tickers[static_cast<std::size_t>(j)]);
            (same ? within : cross) += psi.entries(i, j);
            (same ? n_within : n_cross) += 1;
        }
    }
    within /= n_within;
    cross /= n_cross;
    const double se = 3.0 / std::sqrt(static_cast<double>(cfg.n_obs));
    CHECK(within > cross + se);
}

TEST_CASE("degenerate markets") {
    SUBCASE("identical") {
        const PricePanel p = generate_degenerate_market(DegenerateKind::Identical, 3, 40, 1);
        CHECK(p.prices.row(1) == p.prices.row(0));
        CHECK(p.prices.row(2) == p.prices.row(0));
    }
    SUBCASE("anti requires two series") {
        CHECK_THROWS_AS(generate_degenerate_market(DegenerateKind::Anti, 3, 10, 1), ConfigError);
    }
    SUBCASE("anti gives perfectly negative correlation") {
        const PricePanel p = generate_degenerate_market(DegenerateKind::Anti, 2, 100, 5);
        const ReturnPanel r = log_returns(p);
        const CorrMatrix psi = window_correlation(r, {100, 100}, r.tickers);
        CHECK(psi.entries(0, 1) == doctest::Approx(-1.0).epsilon(1e-12));
    }
    SUBCASE("independent pair has small sample correlation") {
        const PricePanel p = generate_degenerate_market(DegenerateKind::Independent, 2, 10000, 9);
        const ReturnPanel r = log_returns(p);
        const CorrMatrix psi = window_correlation(r, {10000, 10000}, r.tickers);
        CHECK(std::abs(psi.entries(0, 1)) <= 0.04);
    }
}

TEST_CASE("trading calendar is strictly increasing weekdays") {
    const auto dates = trading_dates(300);
    CHECK(dates.front() == "2000-01-03");
    for (std::size_t i = 1; i < dates.size(); ++i) {
        CHECK(dates[i - 1] < dates[i]);
    }
}
