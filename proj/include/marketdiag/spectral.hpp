#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "marketdiag/corr.hpp"
#include "marketdiag/panel.hpp"

namespace marketdiag {

struct EigenResult {
    double lambda1 = 0.0;
    Eigen::VectorXd v1;  // unit norm, sum(v1) >= 0
    double normalized_lambda1 = 0.0;
    int iterations = 0;
    double residual = 0.0;
    // lambda1 - lambda2 estimate; small values flag a near-degenerate leading
    // eigenspace where v1 (and hence h) is ill-conditioned.
    double gap_estimate = 0.0;
    bool used_dense_fallback = false;
};

struct PowerOptions {
    double tol = 1e-10;       // convergence: ||Av - lambda v|| <= tol * N
    int max_iter = 100000;
    const Eigen::VectorXd* warm_start = nullptr;
};

/// Dominant eigenpair via power iteration started near the market mode
/// (1/sqrt(N)), with a dense symmetric eigensolver fallback.
EigenResult leading_eigenpair(const Eigen::MatrixXd& m, const PowerOptions& opts = {});
EigenResult leading_eigenpair(const CorrMatrix& m, const PowerOptions& opts = {});

/// h = |sum_i v_i| / sqrt(N) for a unit vector v (in [0,1]).
double uniformity(const Eigen::VectorXd& v1);

struct CollectivitySeries {
    std::string scope;  // "market", a sector name, or a portfolio id
    std::vector<int> t_values;
    std::vector<std::string> dates;
    std::vector<double> lambda1_norm;
    std::vector<double> uniformity;
};

struct Scope {
    std::string name;
    std::vector<std::string> tickers;
};

/// One series per scope over t = tau .. T.
std::vector<CollectivitySeries> collectivity_series(const ReturnPanel& panel, int tau,
                                                    const std::vector<Scope>& scopes);

/// Scopes for the whole market plus one per sector.
std::vector<Scope> market_and_sector_scopes(const ReturnPanel& panel);

}  // namespace marketdiag
