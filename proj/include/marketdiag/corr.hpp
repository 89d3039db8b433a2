#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "marketdiag/panel.hpp"

namespace marketdiag {

/// Rolling window of tau return observations ending at index t (1-based,
/// tau <= t <= T): covers return columns t-tau .. t-1 (0-based).
struct WindowSpec {
    int tau = 120;
    int end_index = 0;  // t
};

/// Symmetric Pearson correlation matrix over one rolling window.
struct CorrMatrix {
    std::vector<std::string> labels;
    int end_index = 0;
    Eigen::MatrixXd entries;

    Eigen::Index size() const { return entries.rows(); }
};

/// Two-pass Pearson correlation of the given ticker subset over the window.
CorrMatrix window_correlation(const ReturnPanel& panel, const WindowSpec& spec,
                              const std::vector<std::string>& subset);

/// Incremental rolling correlation over an index subset. Maintains window sums
/// updated in O(N^2) per step; a full recomputation every `refresh_every`
/// steps bounds floating-point drift.
class RollingCorrelation {
public:
    RollingCorrelation(const Eigen::MatrixXd& returns, std::vector<int> row_indices, int tau,
                       int refresh_every = 512);

    /// Position the window at end index t (1-based). Moving forward is
    /// incremental; moving backward triggers a full recomputation.
    void seek(int end_index);

    /// Correlation matrix for the current window, written into `out`.
    /// Throws NumericError on a zero-variance series.
    void current(Eigen::MatrixXd& out) const;

    int end_index() const { return end_index_; }
    int tau() const { return tau_; }
    int max_end_index() const { return static_cast<int>(data_.cols()); }
    Eigen::Index size() const { return data_.rows(); }

private:
    void recompute();
    void step_forward();

    Eigen::MatrixXd data_;  // subset rows, contiguous copy
    int tau_;
    int refresh_every_;
    int end_index_ = 0;  // 0 = unpositioned
    int steps_since_refresh_ = 0;
    Eigen::VectorXd sum_;        // per-series window sum
    Eigen::MatrixXd cross_sum_;  // sum of products over the window
};

/// All windows t = tau .. T in order; `emit` receives (t, matrix).
void correlation_series(const ReturnPanel& panel, int tau, const std::vector<std::string>& subset,
                        const std::function<void(int, const CorrMatrix&)>& emit);

std::vector<int> subset_indices(const ReturnPanel& panel, const std::vector<std::string>& subset);

}  // namespace marketdiag
