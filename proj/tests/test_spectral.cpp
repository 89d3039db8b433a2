#include <doctest.h>

#include <random>

#include "marketdiag/corr.hpp"
#include "marketdiag/panel.hpp"
#include "marketdiag/spectral.hpp"
#include "marketdiag/synth.hpp"

using namespace marketdiag;

namespace {

Eigen::MatrixXd random_correlation(int n, int tau, std::mt19937_64& rng) {
    std::normal_distribution<double> dist;
    Eigen::MatrixXd x(n, tau);
    for (int i = 0; i < n; ++i) {
        for (int t = 0; t < tau; ++t) x(i, t) = dist(rng);
    }
    Eigen::VectorXd mean = x.rowwise().mean();
    x.colwise() -= mean;
    Eigen::VectorXd inv_norm = x.rowwise().norm().cwiseInverse();
    x = inv_norm.asDiagonal() * x;
    Eigen::MatrixXd psi = x * x.transpose();
    psi.diagonal().setOnes();
    return psi;
}

}  // namespace

TEST_CASE("all-ones matrix has lambda1 = N and uniform eigenvector") {
    const Eigen::MatrixXd m = Eigen::MatrixXd::Ones(3, 3);
    const EigenResult res = leading_eigenpair(m);
    CHECK(res.lambda1 == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(res.normalized_lambda1 == doctest::Approx(1.0).epsilon(1e-12));
    const double expect = 1.0 / std::sqrt(3.0);
    for (int i = 0; i < 3; ++i) CHECK(res.v1(i) == doctest::Approx(expect).epsilon(1e-9));
}

TEST_CASE("2x2 anti-correlated matrix") {
    Eigen::MatrixXd m(2, 2);
    m << 1.0, -1.0, -1.0, 1.0;
    const EigenResult res = leading_eigenpair(m);
    CHECK(res.lambda1 == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(res.normalized_lambda1 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(std::abs(res.v1(0)) - 1.0 / std::sqrt(2.0)) <= 1e-9);
    CHECK(res.v1(0) * res.v1(1) < 0.0);
    CHECK(res.v1.sum() >= 0.0);
}

TEST_CASE("matches dense decomposition on random correlation matrices") {
    std::mt19937_64 rng(17);
    for (int rep = 0; rep < 100; ++rep) {
        const int n = 2 + static_cast<int>(rng() % 89);
        const Eigen::MatrixXd psi = random_correlation(n, n + 30, rng);
        const EigenResult pi = leading_eigenpair(psi);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> dense(psi);
        CHECK(std::abs(pi.lambda1 - dense.eigenvalues()(n - 1)) <= 1e-8);
        CHECK(std::abs(pi.v1.norm() - 1.0) <= 1e-10);
        CHECK(pi.residual <= 1e-8);
        CHECK(pi.normalized_lambda1 >= 1.0 / n - 1e-9);
        CHECK(pi.normalized_lambda1 <= 1.0 + 1e-9);
    }
}

TEST_CASE("uniformity examples") {
    SUBCASE("uniform vector") {
        Eigen::VectorXd v = Eigen::VectorXd::Constant(4, 0.5);
        CHECK(uniformity(v) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("orthogonal to ones") {
        Eigen::VectorXd v(2);
        v << 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0);
        CHECK(uniformity(v) == doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("basis vector") {
        Eigen::VectorXd v(3);
        v << 1.0, 0.0, 0.0;
        CHECK(uniformity(v) == doctest::Approx(0.57735).epsilon(1e-5));
    }
    SUBCASE("sign-flip invariant") {
        std::mt19937_64 rng(5);
        std::normal_distribution<double> dist;
        Eigen::VectorXd v(7);
        for (int i = 0; i < 7; ++i) v(i) = dist(rng);
        v.normalize();
        CHECK(uniformity(v) == doctest::Approx(uniformity(-v)).epsilon(1e-14));
    }
}

TEST_CASE("permuting tickers permutes v1 and preserves lambda and h") {
    std::mt19937_64 rng(23);
    const Eigen::MatrixXd psi = random_correlation(8, 40, rng);
    const EigenResult base = leading_eigenpair(psi);

    std::vector<int> perm{3, 1, 7, 0, 5, 2, 6, 4};
    Eigen::MatrixXd shuffled(8, 8);
    for (int i = 0; i < 8; ++i) {
        for (int j = 0; j < 8; ++j) shuffled(i, j) = psi(perm[i], perm[j]);
    }
    const EigenResult permuted = leading_eigenpair(shuffled);
    CHECK(std::abs(permuted.lambda1 - base.lambda1) <= 1e-10);
    CHECK(std::abs(uniformity(permuted.v1) - uniformity(base.v1)) <= 1e-10);
    for (int i = 0; i < 8; ++i) {
        CHECK(std::abs(permuted.v1(i) - base.v1(perm[i])) <= 1e-7);
    }
}

TEST_CASE("fully degenerate spectrum still yields lambda1") {
    // Identity: every unit vector is an eigenvector; lambda1 is still 1.
    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(4, 4);
    const EigenResult res = leading_eigenpair(eye);
    CHECK(res.lambda1 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(res.residual <= 1e-12);
}

TEST_CASE("identical-series market gives lambda1_norm and h identically 1") {
    const PricePanel p = generate_degenerate_market(DegenerateKind::Identical, 5, 140, 3);
    const ReturnPanel r = log_returns(p);
    const auto series = collectivity_series(r, 120, market_and_sector_scopes(r));
    for (const auto& s : series) {
        REQUIRE(s.lambda1_norm.size() == 140 - 120 + 1);
        for (std::size_t i = 0; i < s.lambda1_norm.size(); ++i) {
            CHECK(std::abs(s.lambda1_norm[i] - 1.0) <= 1e-9);
            CHECK(std::abs(s.uniformity[i] - 1.0) <= 1e-9);
        }
    }
}

TEST_CASE("series length is 1 when T equals tau") {
    SynthConfig cfg;
    cfg.n_sectors = 2;
    cfg.equities_uniform = 3;
    cfg.n_obs = 120;
    cfg.seed = 8;
    const ReturnPanel r = log_returns(generate_factor_market(cfg));
    const auto series = collectivity_series(r, 120, {{"market", r.tickers}});
    REQUIRE(series.size() == 1);
    CHECK(series[0].lambda1_norm.size() == 1);
}

TEST_CASE("sector scopes show at least market-level collectivity in a factor market") {
    SynthConfig cfg;
    cfg.n_sectors = 4;
    cfg.equities_uniform = 8;
    cfg.n_obs = 400;
    cfg.beta_market = 0.4;
    cfg.beta_sector = 0.5;
    cfg.sigma_idio = 0.77;
    cfg.seed = 12;
    const ReturnPanel r = log_returns(generate_factor_market(cfg));
    const auto series = collectivity_series(r, 120, market_and_sector_scopes(r));
    REQUIRE(series.size() == 5);
    const auto& market = series[0];
    // 3-standard-error slack on the per-window comparison.
    const double slack = 3.0 / std::sqrt(120.0);
    for (std::size_t s = 1; s < series.size(); ++s) {
        for (std::size_t i = 0; i < market.lambda1_norm.size(); ++i) {
            CHECK(series[s].lambda1_norm[i] >= market.lambda1_norm[i] - slack);
        }
    }
}
