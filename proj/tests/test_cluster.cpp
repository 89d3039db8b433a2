#include <doctest.h>

#include <map>
#include <random>
#include <set>

#include "marketdiag/cluster.hpp"
#include "oracles.hpp"

using namespace marketdiag;

namespace {

PercentileCurves constant_curve(int m, int n, double level, int len) {
    PercentileCurves c;
    c.m = m;
    c.n = n;
    for (int t = 0; t < len; ++t) {
        c.t_values.push_back(t);
        c.dates.push_back("d" + std::to_string(t));
        c.p05.push_back(level - 0.01);
        c.p50.push_back(level);
        c.p95.push_back(level + 0.01);
    }
    return c;
}

DistanceMatrix matrix_of(const Eigen::MatrixXd& d) {
    DistanceMatrix dm;
    for (Eigen::Index i = 0; i < d.rows(); ++i) dm.items.emplace_back(0, static_cast<int>(i));
    dm.entries = d;
    return dm;
}

}  // namespace

TEST_CASE("median distance basics") {
    const auto a = constant_curve(2, 2, 0.4, 9);
    const auto b = constant_curve(2, 3, 0.5, 9);
    CHECK(median_distance(a, a) == 0.0);
    CHECK(median_distance(a, b) == doctest::Approx(0.1).epsilon(1e-14));
    CHECK(median_distance(b, a) == doctest::Approx(0.1).epsilon(1e-14));

    auto c = constant_curve(3, 3, 0.5, 7);
    CHECK_THROWS_WITH_AS(median_distance(a, c), doctest::Contains("GridMismatch"), ConfigError);
}

TEST_CASE("median distance matches a hand-summed reference on random curves") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    PercentileCurves a = constant_curve(2, 2, 0.0, 7);
    PercentileCurves b = constant_curve(2, 3, 0.0, 7);
    double expect = 0.0;
    for (int t = 0; t < 7; ++t) {
        a.p50[static_cast<std::size_t>(t)] = dist(rng);
        b.p50[static_cast<std::size_t>(t)] = dist(rng);
        expect += std::abs(a.p50[static_cast<std::size_t>(t)] - b.p50[static_cast<std::size_t>(t)]);
    }
    expect /= 7.0;
    CHECK(std::abs(median_distance(a, b) - expect) <= 1e-12);
}

TEST_CASE("distance matrix is a pseudometric on sampled triples") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> dist(0.2, 0.8);
    std::vector<PercentileCurves> cells;
    for (int i = 0; i < 12; ++i) {
        PercentileCurves c = constant_curve(2 + i / 4, 2 + i % 4, 0.0, 15);
        for (auto& v : c.p50) v = dist(rng);
        cells.push_back(std::move(c));
    }
    const DistanceMatrix dm = distance_matrix(cells);
    CHECK((dm.entries - dm.entries.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(dm.entries.diagonal().cwiseAbs().maxCoeff() == 0.0);
    for (int rep = 0; rep < 500; ++rep) {
        const int i = static_cast<int>(rng() % 12);
        const int j = static_cast<int>(rng() % 12);
        const int k = static_cast<int>(rng() % 12);
        CHECK(dm.entries(i, k) <= dm.entries(i, j) + dm.entries(j, k) + 1e-12);
    }
}

TEST_CASE("three items with forced merge order") {
    Eigen::MatrixXd d(3, 3);
    d << 0, 1, 10, 1, 0, 10, 10, 10, 0;
    const Dendrogram dend = average_linkage(matrix_of(d));
    REQUIRE(dend.merges.size() == 2);
    CHECK(dend.merges[0].child_a == 0);
    CHECK(dend.merges[0].child_b == 1);
    CHECK(dend.merges[0].height == 1.0);
    CHECK(dend.merges[1].child_a == 2);
    CHECK(dend.merges[1].child_b == 3);
    CHECK(dend.merges[1].height == 10.0);
}

TEST_CASE("matches the naive O(K^3) reference on random matrices") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> dist(0.1, 2.0);
    for (int rep = 0; rep < 25; ++rep) {
        const int k = 10;
        Eigen::MatrixXd d = Eigen::MatrixXd::Zero(k, k);
        for (int i = 0; i < k; ++i) {
            for (int j = 0; j < i; ++j) {
                const double v = dist(rng);
                d(i, j) = v;
                d(j, i) = v;
            }
        }
        const Dendrogram dend = average_linkage(matrix_of(d));
        const auto naive = oracles::naive_upgma(d);
        REQUIRE(dend.merges.size() == naive.size());
        double prev = 0.0;
        for (std::size_t i = 0; i < naive.size(); ++i) {
            CHECK(dend.merges[i].child_a == naive[i].child_a);
            CHECK(dend.merges[i].child_b == naive[i].child_b);
            CHECK(std::abs(dend.merges[i].height - naive[i].height) <= 1e-12);
            CHECK(dend.merges[i].height >= prev - 1e-12);  // UPGMA monotonicity
            prev = dend.merges[i].height;
        }
    }
}

TEST_CASE("planted families are recovered exactly at k=3") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> jitter(-0.005, 0.005);
    std::vector<PercentileCurves> cells;
    std::vector<int> truth;
    const double centers[3] = {0.2, 0.5, 0.8};
    for (int fam = 0; fam < 3; ++fam) {
        for (int i = 0; i < 5; ++i) {
            PercentileCurves c = constant_curve(fam + 2, i + 2, 0.0, 20);
            for (auto& v : c.p50) v = centers[fam] + jitter(rng);
            cells.push_back(std::move(c));
            truth.push_back(fam);
        }
    }
    const DistanceMatrix dm = distance_matrix(cells);
    const Dendrogram dend = average_linkage(dm);
    const auto assignment = cut_clusters(dend, 3);

    // Purity 1.0: each found cluster maps to exactly one planted family.
    std::map<int, std::set<int>> seen;
    for (std::size_t i = 0; i < assignment.size(); ++i) {
        seen[assignment[i]].insert(truth[i]);
    }
    CHECK(seen.size() == 3);
    for (const auto& [cluster, families] : seen) CHECK(families.size() == 1);
}

TEST_CASE("cut_clusters edge cases") {
    Eigen::MatrixXd d(3, 3);
    d << 0, 1, 2, 1, 0, 3, 2, 3, 0;
    const Dendrogram dend = average_linkage(matrix_of(d));
    CHECK(cut_clusters(dend, 1) == std::vector<int>{0, 0, 0});
    CHECK(cut_clusters(dend, 3) == std::vector<int>{0, 1, 2});
    CHECK_THROWS_WITH_AS(cut_clusters(dend, 0), doctest::Contains("BadK"), ConfigError);
    CHECK_THROWS_WITH_AS(cut_clusters(dend, 4), doctest::Contains("BadK"), ConfigError);
}

TEST_CASE("permuting items yields an isomorphic dendrogram") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> dist(0.1, 2.0);
    const int k = 8;
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(k, k);
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < i; ++j) {
            const double v = dist(rng);
            d(i, j) = v;
            d(j, i) = v;
        }
    }
    const std::vector<int> perm{5, 2, 7, 0, 3, 6, 1, 4};
    Eigen::MatrixXd dp(k, k);
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) {
            dp(i, j) = d(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
        }
    }
    const Dendrogram a = average_linkage(matrix_of(d));
    const Dendrogram b = average_linkage(matrix_of(dp));
    for (std::size_t i = 0; i < a.merges.size(); ++i) {
        CHECK(std::abs(a.merges[i].height - b.merges[i].height) <= 1e-12);
    }
    // Cluster assignments agree up to relabeling.
    const auto ca = cut_clusters(a, 3);
    const auto cb = cut_clusters(b, 3);
    std::map<int, int> mapping;
    for (int i = 0; i < k; ++i) {
        const int from = cb[static_cast<std::size_t>(i)];
        const int to = ca[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])];
        auto it = mapping.find(from);
        if (it == mapping.end()) {
            mapping[from] = to;
        } else {
            CHECK(it->second == to);
        }
    }
}
