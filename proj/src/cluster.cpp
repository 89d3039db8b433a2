#include "marketdiag/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>

#include "marketdiag/errors.hpp"

namespace marketdiag {

double median_distance(const PercentileCurves& a, const PercentileCurves& b) {
    if (a.t_values != b.t_values) {
        throw ConfigError("GridMismatch: curves cover different time grids");
    }
    if (a.p50.empty()) throw ConfigError("GridMismatch: empty curves");
    double sum = 0.0;
    for (std::size_t i = 0; i < a.p50.size(); ++i) {
        sum += std::abs(a.p50[i] - b.p50[i]);
    }
    return sum / static_cast<double>(a.p50.size());
}

DistanceMatrix distance_matrix(const std::vector<PercentileCurves>& cells) {
    if (cells.empty()) throw ConfigError("distance_matrix: no cells");
    DistanceMatrix dm;
    const auto k = static_cast<Eigen::Index>(cells.size());
    dm.entries.setZero(k, k);
    for (const auto& c : cells) dm.items.emplace_back(c.m, c.n);
    for (Eigen::Index i = 0; i < k; ++i) {
        for (Eigen::Index j = 0; j < i; ++j) {
            const double d = median_distance(cells[static_cast<std::size_t>(i)],
                                             cells[static_cast<std::size_t>(j)]);
            dm.entries(i, j) = d;
            dm.entries(j, i) = d;
        }
    }
    return dm;
}

DistanceMatrix distance_matrix(const SamplingResult& result) {
    return distance_matrix(result.cells);
}

Dendrogram average_linkage(const DistanceMatrix& dm) {
    const int k = static_cast<int>(dm.items.size());
    if (k < 1 || dm.entries.rows() != k || dm.entries.cols() != k) {
        throw ConfigError("average_linkage: invalid distance matrix");
    }

    struct Active {
        int id;
        int size;
    };
    std::vector<Active> active;
    for (int i = 0; i < k; ++i) active.push_back({i, 1});
    Eigen::MatrixXd d = dm.entries;  // indexed by active slot

    Dendrogram out;
    out.n_leaves = k;
    for (int step = 0; step < k - 1; ++step) {
        // Minimum-distance active pair; scan in id order so equal distances
        // resolve to the lexicographically smallest id pair.
        std::vector<int> order(active.size());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(),
                  [&](int a, int b) { return active[static_cast<std::size_t>(a)].id <
                                             active[static_cast<std::size_t>(b)].id; });
        int best_a = -1, best_b = -1;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t oi = 0; oi < order.size(); ++oi) {
            for (std::size_t oj = oi + 1; oj < order.size(); ++oj) {
                const int a = order[oi], b = order[oj];
                if (d(a, b) < best) {
                    best = d(a, b);
                    best_a = a;
                    best_b = b;
                }
            }
        }

        const int id_a = std::min(active[static_cast<std::size_t>(best_a)].id,
                                  active[static_cast<std::size_t>(best_b)].id);
        const int id_b = std::max(active[static_cast<std::size_t>(best_a)].id,
                                  active[static_cast<std::size_t>(best_b)].id);
        out.merges.push_back({id_a, id_b, best});

        // Lance-Williams update for unweighted averages: slot best_a becomes
        // the merged cluster, slot best_b is retired (swap with the last).
        const double sa = active[static_cast<std::size_t>(best_a)].size;
        const double sb = active[static_cast<std::size_t>(best_b)].size;
        for (std::size_t c = 0; c < active.size(); ++c) {
            if (static_cast<int>(c) == best_a || static_cast<int>(c) == best_b) continue;
            const double v = (sa * d(best_a, static_cast<Eigen::Index>(c)) +
                              sb * d(best_b, static_cast<Eigen::Index>(c))) /
                             (sa + sb);
            d(best_a, static_cast<Eigen::Index>(c)) = v;
            d(static_cast<Eigen::Index>(c), best_a) = v;
        }
        active[static_cast<std::size_t>(best_a)] = {k + step, static_cast<int>(sa + sb)};

        const int last = static_cast<int>(active.size()) - 1;
        if (best_b != last) {
            active[static_cast<std::size_t>(best_b)] = active[static_cast<std::size_t>(last)];
            d.col(best_b) = d.col(last);
            d.row(best_b) = d.row(last);
        }
        active.pop_back();
    }
    return out;
}

std::vector<int> cut_clusters(const Dendrogram& dendrogram, int k) {
    const int n = dendrogram.n_leaves;
    if (k < 1 || k > n) throw ConfigError("BadK: k must be in [1, " + std::to_string(n) + "]");

    // Apply the first n-k merges; the remaining roots are the clusters.
    std::vector<int> parent(static_cast<std::size_t>(2 * n - 1));
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            parent[static_cast<std::size_t>(x)] =
                parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            x = parent[static_cast<std::size_t>(x)];
        }
        return x;
    };
    for (int i = 0; i < n - k; ++i) {
        const Merge& m = dendrogram.merges[static_cast<std::size_t>(i)];
        parent[static_cast<std::size_t>(find(m.child_a))] = n + i;
        parent[static_cast<std::size_t>(find(m.child_b))] = n + i;
    }

    // Number clusters 0..k-1 in order of their smallest member.
    std::map<int, int> cluster_id;
    std::vector<int> assignment(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const int root = find(i);
        auto it = cluster_id.find(root);
        if (it == cluster_id.end()) {
            it = cluster_id.emplace(root, static_cast<int>(cluster_id.size())).first;
        }
        assignment[static_cast<std::size_t>(i)] = it->second;
    }
    return assignment;
}

}  // namespace marketdiag
