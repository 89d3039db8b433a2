// Independent brute-force reference implementations used only by tests.
// Each one follows the defining formula literally, with none of the
// incremental-update or linkage-update machinery of the library code.
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace oracles {

// Literal Pearson correlation of rows i and j of `returns` over the tau
// observations ending at end_index (1-based), including the centering sums.
inline double brute_pearson(const Eigen::MatrixXd& returns, int i, int j, int tau,
                            int end_index) {
    const int begin = end_index - tau;
    double mean_i = 0.0, mean_j = 0.0;
    for (int s = 0; s < tau; ++s) {
        mean_i += returns(i, begin + s);
        mean_j += returns(j, begin + s);
    }
    mean_i /= tau;
    mean_j /= tau;
    double num = 0.0, den_i = 0.0, den_j = 0.0;
    for (int s = 0; s < tau; ++s) {
        const double a = returns(i, begin + s) - mean_i;
        const double b = returns(j, begin + s) - mean_j;
        num += a * b;
        den_i += a * a;
        den_j += b * b;
    }
    return num / std::sqrt(den_i * den_j);
}

// Q as the literal double sum over ordered pairs within each group,
// including i == j.
inline double brute_modularity(const Eigen::MatrixXd& a,
                               const std::vector<std::vector<int>>& groups) {
    const int n = static_cast<int>(a.rows());
    std::vector<double> k(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) k[static_cast<std::size_t>(i)] += a(i, j);
    }
    const double two_e = a.sum();
    double q = 0.0;
    for (const auto& group : groups) {
        for (int i : group) {
            for (int j : group) {
                q += a(i, j) - k[static_cast<std::size_t>(i)] * k[static_cast<std::size_t>(j)] / two_e;
            }
        }
    }
    return q / two_e;
}

struct NaiveMerge {
    int child_a, child_b;
    double height;
};

// O(K^3) UPGMA keeping explicit member lists; inter-cluster distance is
// recomputed from the original matrix at every step.
inline std::vector<NaiveMerge> naive_upgma(const Eigen::MatrixXd& d0) {
    const int k = static_cast<int>(d0.rows());
    struct Cluster {
        int id;
        std::vector<int> members;
    };
    std::vector<Cluster> clusters;
    for (int i = 0; i < k; ++i) clusters.push_back({i, {i}});

    std::vector<NaiveMerge> merges;
    int next_id = k;
    while (clusters.size() > 1) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t bi = 0, bj = 0;
        // Scan in id order so ties resolve to the smallest id pair.
        std::vector<std::size_t> order(clusters.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return clusters[a].id < clusters[b].id; });
        for (std::size_t oi = 0; oi < order.size(); ++oi) {
            for (std::size_t oj = oi + 1; oj < order.size(); ++oj) {
                const auto& ca = clusters[order[oi]];
                const auto& cb = clusters[order[oj]];
                double sum = 0.0;
                for (int x : ca.members) {
                    for (int y : cb.members) sum += d0(x, y);
                }
                const double avg = sum / (static_cast<double>(ca.members.size()) *
                                          static_cast<double>(cb.members.size()));
                if (avg < best) {
                    best = avg;
                    bi = order[oi];
                    bj = order[oj];
                }
            }
        }
        Cluster merged;
        merged.id = next_id++;
        merged.members = clusters[bi].members;
        merged.members.insert(merged.members.end(), clusters[bj].members.begin(),
                              clusters[bj].members.end());
        merges.push_back({std::min(clusters[bi].id, clusters[bj].id),
                          std::max(clusters[bi].id, clusters[bj].id), best});
        if (bi > bj) std::swap(bi, bj);
        clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(bj));
        clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(bi));
        clusters.push_back(std::move(merged));
    }
    return merges;
}

}  // namespace oracles
