#include "marketdiag/corr.hpp"

#include <cmath>

#include "marketdiag/errors.hpp"

namespace marketdiag {

std::vector<int> subset_indices(const ReturnPanel& panel, const std::vector<std::string>& subset) {
    if (subset.empty()) throw ConfigError("empty ticker subset");
    std::vector<int> idx;
    idx.reserve(subset.size());
    for (const auto& tk : subset) idx.push_back(panel.index_of(tk));
    return idx;
}

CorrMatrix window_correlation(const ReturnPanel& panel, const WindowSpec& spec,
                              const std::vector<std::string>& subset) {
    const int t_total = static_cast<int>(panel.n_obs());
    if (spec.tau < 2 || spec.tau > t_total) {
        throw ConfigError("OutOfRangeWindow: tau " + std::to_string(spec.tau));
    }
    if (spec.end_index < spec.tau || spec.end_index > t_total) {
        throw ConfigError("OutOfRangeWindow: end index " + std::to_string(spec.end_index));
    }
    const auto idx = subset_indices(panel, subset);
    const auto n = static_cast<Eigen::Index>(idx.size());
    const int tau = spec.tau;
    const int begin = spec.end_index - tau;  // 0-based first column

    // Two-pass: means first, then centered products.
    Eigen::MatrixXd window(n, tau);
    for (Eigen::Index i = 0; i < n; ++i) {
        window.row(i) = panel.returns.block(idx[static_cast<std::size_t>(i)], begin, 1, tau);
    }
    const Eigen::VectorXd means = window.rowwise().mean();
    Eigen::MatrixXd centered = window.colwise() - means;

    Eigen::VectorXd sq = centered.rowwise().squaredNorm();
    for (Eigen::Index i = 0; i < n; ++i) {
        if (sq(i) <= 0.0) {
            throw NumericError("ZeroVarianceWindow: ticker " + subset[static_cast<std::size_t>(i)] +
                               " at t=" + std::to_string(spec.end_index));
        }
    }

    CorrMatrix out;
    out.labels = subset;
    out.end_index = spec.end_index;
    out.entries.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        out.entries(i, i) = 1.0;
        for (Eigen::Index j = 0; j < i; ++j) {
            double v = centered.row(i).dot(centered.row(j)) / std::sqrt(sq(i) * sq(j));
            v = std::clamp(v, -1.0, 1.0);
            out.entries(i, j) = v;
            out.entries(j, i) = v;
        }
    }
    return out;
}

RollingCorrelation::RollingCorrelation(const Eigen::MatrixXd& returns,
                                       std::vector<int> row_indices, int tau, int refresh_every)
    : tau_(tau), refresh_every_(refresh_every) {
    if (row_indices.empty()) throw ConfigError("RollingCorrelation: empty subset");
    if (tau < 2 || tau > returns.cols()) {
        throw ConfigError("OutOfRangeWindow: tau " + std::to_string(tau) + " for T=" +
                          std::to_string(returns.cols()));
    }
    data_.resize(static_cast<Eigen::Index>(row_indices.size()), returns.cols());
    for (std::size_t i = 0; i < row_indices.size(); ++i) {
        data_.row(static_cast<Eigen::Index>(i)) = returns.row(row_indices[i]);
    }
    sum_.resize(data_.rows());
    cross_sum_.resize(data_.rows(), data_.rows());
}

void RollingCorrelation::seek(int end_index) {
    if (end_index < tau_ || end_index > max_end_index()) {
        throw ConfigError("OutOfRangeWindow: end index " + std::to_string(end_index));
    }
    if (end_index_ == 0 || end_index < end_index_) {
        end_index_ = end_index;
        recompute();
        return;
    }
    while (end_index_ < end_index) {
        ++end_index_;
        ++steps_since_refresh_;
        if (steps_since_refresh_ >= refresh_every_) {
            recompute();
        } else {
            step_forward();
        }
    }
}

void RollingCorrelation::recompute() {
    const auto block = data_.middleCols(end_index_ - tau_, tau_);
    sum_ = block.rowwise().sum();
    cross_sum_.noalias() = block * block.transpose();
    steps_since_refresh_ = 0;
}

void RollingCorrelation::step_forward() {
    // Window moved from ending at t-1 to ending at t: add column t-1 (0-based),
    // drop column t-1-tau.
    const auto incoming = data_.col(end_index_ - 1);
    const auto outgoing = data_.col(end_index_ - 1 - tau_);
    sum_ += incoming - outgoing;
    cross_sum_.noalias() += incoming * incoming.transpose();
    cross_sum_.noalias() -= outgoing * outgoing.transpose();
}

void RollingCorrelation::current(Eigen::MatrixXd& out) const {
    if (end_index_ == 0) throw ConfigError("RollingCorrelation: window not positioned");
    const auto n = data_.rows();
    const double inv_tau = 1.0 / static_cast<double>(tau_);
    out.resize(n, n);

    Eigen::VectorXd inv_std(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double var = cross_sum_(i, i) - sum_(i) * sum_(i) * inv_tau;
        if (var <= 0.0) {
            throw NumericError("ZeroVarianceWindow: series " + std::to_string(i) + " at t=" +
                               std::to_string(end_index_));
        }
        inv_std(i) = 1.0 / std::sqrt(var);
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        out(i, i) = 1.0;
        for (Eigen::Index j = 0; j < i; ++j) {
            const double cov = cross_sum_(i, j) - sum_(i) * sum_(j) * inv_tau;
            const double v = std::clamp(cov * inv_std(i) * inv_std(j), -1.0, 1.0);
            out(i, j) = v;
            out(j, i) = v;
        }
    }
}

void correlation_series(const ReturnPanel& panel, int tau, const std::vector<std::string>& subset,
                        const std::function<void(int, const CorrMatrix&)>& emit) {
    const auto idx = subset_indices(panel, subset);
    RollingCorrelation roll(panel.returns, idx, tau);
    CorrMatrix m;
    m.labels = subset;
    for (int t = tau; t <= static_cast<int>(panel.n_obs()); ++t) {
        roll.seek(t);
        roll.current(m.entries);
        m.end_index = t;
        emit(t, m);
    }
}

}  // namespace marketdiag
