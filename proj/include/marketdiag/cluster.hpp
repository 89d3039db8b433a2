#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "marketdiag/sampler.hpp"

namespace marketdiag {

/// L1 distance between median curves: mean_t |p50_a(t) - p50_b(t)|.
double median_distance(const PercentileCurves& a, const PercentileCurves& b);

struct DistanceMatrix {
    std::vector<std::pair<int, int>> items;  // grid cells (m,n)
    Eigen::MatrixXd entries;                 // symmetric, zero diagonal
};

DistanceMatrix distance_matrix(const SamplingResult& result);
DistanceMatrix distance_matrix(const std::vector<PercentileCurves>& cells);

/// Ids 0..K-1 are leaves; merge i creates id K+i.
struct Merge {
    int child_a = 0;
    int child_b = 0;
    double height = 0.0;
};

struct Dendrogram {
    int n_leaves = 0;
    std::vector<Merge> merges;  // K-1 entries, non-decreasing heights
};

/// Agglomerative UPGMA: inter-cluster distance is the unweighted average of
/// all cross pairs; merge the minimum-distance pair, ties broken by the
/// lexicographically smallest id pair.
Dendrogram average_linkage(const DistanceMatrix& dm);

/// Undo the last k-1 merges; returns item -> cluster id (0..k-1, numbered by
/// smallest member item).
std::vector<int> cut_clusters(const Dendrogram& dendrogram, int k);

}  // namespace marketdiag
