#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "marketdiag/corr.hpp"
#include "marketdiag/panel.hpp"

namespace marketdiag {

/// Correlation matrix viewed as a weighted graph: A_ij = |Psi_ij|.
struct WeightedGraph {
    std::vector<std::string> labels;
    Eigen::MatrixXd adjacency;
    Eigen::VectorXd degrees;  // k_i = row sums
    double total_edge_weight = 0.0;  // e = sum(k_i) / 2
};

/// Disjoint nonempty label groups covering all graph labels.
struct Partition {
    std::vector<std::vector<std::string>> groups;

    void validate_against(const std::vector<std::string>& labels) const;
};

/// zero_diagonal drops the self-loops A_ii (sensitivity variant); the default
/// keeps them, following the unrestricted double sum in the modularity formula.
WeightedGraph adjacency_from_correlation(const CorrMatrix& m, bool zero_diagonal = false);

/// Q = (1/2e) sum_m sum_{i,j in S_m} (A_ij - k_i k_j / 2e), ordered pairs
/// including i=j.
double modularity(const WeightedGraph& g, const Partition& p);

struct ModularitySeries {
    std::vector<int> t_values;
    std::vector<std::string> dates;
    std::vector<double> q;
};

ModularitySeries modularity_series(const ReturnPanel& panel, int tau, const Partition& p,
                                   bool zero_diagonal = false);

/// Sector partition read off the panel's metadata.
Partition sector_partition(const ReturnPanel& panel);

struct BaselineResult {
    std::vector<int> t_values;
    std::vector<std::string> dates;
    std::vector<double> q_mean;  // across the K random allocations
    std::vector<double> q_p05;
    std::vector<double> q_p95;
    std::vector<std::vector<double>> per_draw;  // [draw][t]
};

/// K seeded random allocations of the labels into groups with the given size
/// profile; Q(t) per allocation plus pointwise mean and 5/95 percentiles.
BaselineResult random_partition_baseline(const ReturnPanel& panel, int tau,
                                         const std::vector<int>& sizes, int draws,
                                         std::uint64_t seed, bool zero_diagonal = false);

}  // namespace marketdiag
