#include "marketdiag/netdiag.hpp"

#include <numeric>
#include <set>
#include <unordered_map>

#include "marketdiag/errors.hpp"
#include "marketdiag/rng.hpp"
#include "marketdiag/stats.hpp"

namespace marketdiag {

namespace {

// Q from precomputed adjacency quantities; groups hold row indices.
double modularity_indexed(const Eigen::MatrixXd& a, const Eigen::VectorXd& k, double e,
                          const std::vector<std::vector<int>>& groups) {
    if (e <= 0.0) throw NumericError("EmptyGraph: total edge weight is zero");
    const double two_e = 2.0 * e;
    double q = 0.0;
    for (const auto& group : groups) {
        double within = 0.0;
        double k_sum = 0.0;
        for (int i : group) {
            k_sum += k(i);
            for (int j : group) within += a(i, j);
        }
        q += within - k_sum * k_sum / two_e;
    }
    return q / two_e;
}

Eigen::VectorXd abs_adjacency(const Eigen::MatrixXd& psi, bool zero_diagonal,
                              Eigen::MatrixXd& a) {
    a = psi.cwiseAbs();
    if (zero_diagonal) a.diagonal().setZero();
    return a.rowwise().sum();
}

}  // namespace

void Partition::validate_against(const std::vector<std::string>& labels) const {
    std::set<std::string> seen;
    std::size_t total = 0;
    for (const auto& group : groups) {
        if (group.empty()) throw ConfigError("Partition: empty group");
        for (const auto& l : group) {
            if (!seen.insert(l).second) throw ConfigError("Partition: duplicate label " + l);
            ++total;
        }
    }
    if (total != labels.size()) {
        throw ConfigError("Partition: covers " + std::to_string(total) + " labels, graph has " +
                          std::to_string(labels.size()));
    }
    for (const auto& l : labels) {
        if (seen.find(l) == seen.end()) throw ConfigError("Partition: label " + l + " missing");
    }
}

WeightedGraph adjacency_from_correlation(const CorrMatrix& m, bool zero_diagonal) {
    WeightedGraph g;
    g.labels = m.labels;
    g.degrees = abs_adjacency(m.entries, zero_diagonal, g.adjacency);
    g.total_edge_weight = 0.5 * g.degrees.sum();
    return g;
}

double modularity(const WeightedGraph& g, const Partition& p) {
    p.validate_against(g.labels);
    std::unordered_map<std::string, int> index;
    for (std::size_t i = 0; i < g.labels.size(); ++i) {
        index[g.labels[i]] = static_cast<int>(i);
    }
    std::vector<std::vector<int>> groups;
    groups.reserve(p.groups.size());
    for (const auto& group : p.groups) {
        std::vector<int> idx;
        idx.reserve(group.size());
        for (const auto& l : group) idx.push_back(index.at(l));
        groups.push_back(std::move(idx));
    }
    return modularity_indexed(g.adjacency, g.degrees, g.total_edge_weight, groups);
}

Partition sector_partition(const ReturnPanel& panel) {
    Partition p;
    for (const auto& sec : panel.sector_names()) {
        std::vector<std::string> group;
        for (int i : panel.sector_indices(sec)) {
            group.push_back(panel.tickers[static_cast<std::size_t>(i)]);
        }
        p.groups.push_back(std::move(group));
    }
    return p;
}

ModularitySeries modularity_series(const ReturnPanel& panel, int tau, const Partition& p,
                                   bool zero_diagonal) {
    p.validate_against(panel.tickers);
    std::unordered_map<std::string, int> index;
    for (std::size_t i = 0; i < panel.tickers.size(); ++i) {
        index[panel.tickers[i]] = static_cast<int>(i);
    }
    std::vector<std::vector<int>> groups;
    for (const auto& group : p.groups) {
        std::vector<int> idx;
        for (const auto& l : group) idx.push_back(index.at(l));
        groups.push_back(std::move(idx));
    }

    std::vector<int> all(panel.tickers.size());
    std::iota(all.begin(), all.end(), 0);
    RollingCorrelation roll(panel.returns, all, tau);

    ModularitySeries series;
    Eigen::MatrixXd psi, a;
    for (int t = tau; t <= static_cast<int>(panel.n_obs()); ++t) {
        roll.seek(t);
        roll.current(psi);
        const Eigen::VectorXd k = abs_adjacency(psi, zero_diagonal, a);
        const double e = 0.5 * k.sum();
        series.t_values.push_back(t);
        series.dates.push_back(panel.dates[static_cast<std::size_t>(t - 1)]);
        series.q.push_back(modularity_indexed(a, k, e, groups));
    }
    return series;
}

BaselineResult random_partition_baseline(const ReturnPanel& panel, int tau,
                                         const std::vector<int>& sizes, int draws,
                                         std::uint64_t seed, bool zero_diagonal) {
    const int n = static_cast<int>(panel.n_equities());
    const int total = std::accumulate(sizes.begin(), sizes.end(), 0);
    if (total != n) {
        throw ConfigError("SizeMismatch: group sizes sum to " + std::to_string(total) +
                          ", panel has " + std::to_string(n) + " tickers");
    }
    if (draws < 1) throw ConfigError("baseline needs K >= 1");

    // One random allocation per draw, fixed across the whole time span.
    std::vector<std::vector<std::vector<int>>> allocations;
    allocations.reserve(static_cast<std::size_t>(draws));
    for (int d = 0; d < draws; ++d) {
        std::mt19937_64 rng(hash2(seed, static_cast<std::uint64_t>(d)));
        std::vector<int> order(static_cast<std::size_t>(n));
        std::iota(order.begin(), order.end(), 0);
        for (int i = n - 1; i > 0; --i) {
            std::swap(order[static_cast<std::size_t>(i)],
                      order[bounded(rng, static_cast<std::uint64_t>(i) + 1)]);
        }
        std::vector<std::vector<int>> groups;
        std::size_t pos = 0;
        for (int sz : sizes) {
            groups.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(pos),
                                order.begin() + static_cast<std::ptrdiff_t>(pos + sz));
            pos += static_cast<std::size_t>(sz);
        }
        allocations.push_back(std::move(groups));
    }

    std::vector<int> all(static_cast<std::size_t>(n));
    std::iota(all.begin(), all.end(), 0);
    RollingCorrelation roll(panel.returns, all, tau);

    BaselineResult out;
    out.per_draw.assign(static_cast<std::size_t>(draws), {});
    Eigen::MatrixXd psi, a;
    for (int t = tau; t <= static_cast<int>(panel.n_obs()); ++t) {
        roll.seek(t);
        roll.current(psi);
        const Eigen::VectorXd k = abs_adjacency(psi, zero_diagonal, a);
        const double e = 0.5 * k.sum();
        std::vector<double> qs(static_cast<std::size_t>(draws));
        for (int d = 0; d < draws; ++d) {
            qs[static_cast<std::size_t>(d)] =
                modularity_indexed(a, k, e, allocations[static_cast<std::size_t>(d)]);
            out.per_draw[static_cast<std::size_t>(d)].push_back(qs[static_cast<std::size_t>(d)]);
        }
        out.t_values.push_back(t);
        out.dates.push_back(panel.dates[static_cast<std::size_t>(t - 1)]);
        out.q_mean.push_back(mean(qs));
        out.q_p05.push_back(percentile(qs, 0.05));
        out.q_p95.push_back(percentile(qs, 0.95));
    }
    return out;
}

}  // namespace marketdiag
