#include "marketdiag/spectral.hpp"

#include <cmath>

#include "marketdiag/errors.hpp"
#include "marketdiag/rng.hpp"

namespace marketdiag {

namespace {

void apply_sign_convention(Eigen::VectorXd& v) {
    if (v.sum() < 0.0) v = -v;
}

// Unit vector near the all-ones direction with a deterministic jitter so it is
// never an exact eigenvector of a subdominant eigenvalue (for any 2x2
// correlation matrix the ones vector is one).
Eigen::VectorXd jittered_ones(Eigen::Index n) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        v(i) = 1.0 + 0.01 * (uniform01(mix64(static_cast<std::uint64_t>(i) + 1)) - 0.5);
    }
    v.normalize();
    return v;
}

struct PowerState {
    double lambda = 0.0;
    Eigen::VectorXd v;
    double residual = 0.0;
    double rate = 0.0;  // residual contraction ratio, ~ lambda2/lambda1
    int iterations = 0;
    bool converged = false;
};

// Power iteration on m, optionally deflated by lambda_d * v_d v_d^T.
PowerState run_power(const Eigen::MatrixXd& m, Eigen::VectorXd v, double threshold, int max_iter,
                     double deflate_lambda = 0.0, const Eigen::VectorXd* deflate_v = nullptr) {
    PowerState st;
    Eigen::VectorXd w(v.size());
    double prev_residual = -1.0;
    for (int iter = 1; iter <= max_iter; ++iter) {
        w.noalias() = m * v;
        if (deflate_v) w.noalias() -= (deflate_lambda * deflate_v->dot(v)) * (*deflate_v);
        st.lambda = v.dot(w);
        st.residual = (w - st.lambda * v).norm();
        st.iterations = iter;
        if (prev_residual > 0.0 && st.residual > 0.0) st.rate = st.residual / prev_residual;
        prev_residual = st.residual;
        if (st.residual <= threshold) {
            st.converged = true;
            break;
        }
        const double norm = w.norm();
        if (norm == 0.0) {  // v is (numerically) annihilated; lambda is 0
            st.lambda = 0.0;
            st.converged = true;
            break;
        }
        v = w / norm;
    }
    st.v = std::move(v);
    return st;
}

EigenResult dense_leading(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
    if (solver.info() != Eigen::Success) {
        throw NumericError("dense eigensolver failed on " + std::to_string(m.rows()) + "x" +
                           std::to_string(m.cols()) + " matrix");
    }
    const auto n = m.rows();
    EigenResult res;
    res.lambda1 = solver.eigenvalues()(n - 1);
    res.v1 = solver.eigenvectors().col(n - 1);
    res.v1.normalize();
    apply_sign_convention(res.v1);
    res.normalized_lambda1 = res.lambda1 / static_cast<double>(n);
    res.residual = (m * res.v1 - res.lambda1 * res.v1).norm();
    res.gap_estimate = n > 1 ? res.lambda1 - solver.eigenvalues()(n - 2) : res.lambda1;
    res.used_dense_fallback = true;
    return res;
}

}  // namespace

EigenResult leading_eigenpair(const Eigen::MatrixXd& m, const PowerOptions& opts) {
    const auto n = m.rows();
    if (n == 0 || m.cols() != n) throw ConfigError("leading_eigenpair: matrix must be square");
    if (n == 1) {
        EigenResult res;
        res.lambda1 = m(0, 0);
        res.v1 = Eigen::VectorXd::Ones(1);
        res.normalized_lambda1 = res.lambda1;
        res.gap_estimate = res.lambda1;
        return res;
    }

    Eigen::VectorXd start;
    if (opts.warm_start && opts.warm_start->size() == n && opts.warm_start->norm() > 0) {
        start = opts.warm_start->normalized();
    } else {
        start = jittered_ones(n);
    }

    const double threshold = opts.tol * static_cast<double>(n);
    int total_iterations = 0;
    for (int attempt = 0; attempt < 2; ++attempt) {
        PowerState main = run_power(m, std::move(start), threshold, opts.max_iter);
        total_iterations += main.iterations;
        if (!main.converged) break;  // likely a degenerate leading eigenspace

        // A cheap gap estimate from the residual contraction rate; refined by
        // the probe below when one runs.
        double gap = main.lambda * (1.0 - std::min(main.rate, 1.0));
        if (main.iterations <= 3) {
            // Near-instant convergence can mean the start vector was itself an
            // eigenvector of a subdominant eigenvalue. Probe the deflated
            // matrix: its dominant eigenvalue must not exceed the one found.
            const PowerState probe = run_power(m, jittered_ones(n), std::max(threshold, 1e-6),
                                               30, main.lambda, &main.v);
            total_iterations += probe.iterations;
            if (probe.lambda > main.lambda + 1e-10 * std::abs(main.lambda) + 1e-12) {
                start = probe.v;  // rich in the true leading direction; retry
                continue;
            }
            gap = main.lambda - std::min(probe.lambda, main.lambda);
        }

        EigenResult res;
        res.lambda1 = main.lambda;
        res.v1 = std::move(main.v);
        apply_sign_convention(res.v1);
        res.normalized_lambda1 = main.lambda / static_cast<double>(n);
        res.iterations = total_iterations;
        res.residual = main.residual;
        res.gap_estimate = gap;
        return res;
    }
    return dense_leading(m);
}

EigenResult leading_eigenpair(const CorrMatrix& m, const PowerOptions& opts) {
    return leading_eigenpair(m.entries, opts);
}

double uniformity(const Eigen::VectorXd& v1) {
    if (v1.size() == 0) throw ConfigError("uniformity: empty vector");
    const double h = std::abs(v1.sum()) / std::sqrt(static_cast<double>(v1.size()));
    return std::min(h, 1.0);
}

std::vector<Scope> market_and_sector_scopes(const ReturnPanel& panel) {
    std::vector<Scope> scopes;
    scopes.push_back({"market", panel.tickers});
    for (const auto& sec : panel.sector_names()) {
        Scope s;
        s.name = sec;
        for (int i : panel.sector_indices(sec)) {
            s.tickers.push_back(panel.tickers[static_cast<std::size_t>(i)]);
        }
        scopes.push_back(std::move(s));
    }
    return scopes;
}

std::vector<CollectivitySeries> collectivity_series(const ReturnPanel& panel, int tau,
                                                    const std::vector<Scope>& scopes) {
    std::vector<CollectivitySeries> out;
    out.reserve(scopes.size());
    const int t_total = static_cast<int>(panel.n_obs());
    for (const auto& scope : scopes) {
        if (scope.tickers.empty()) throw ConfigError("empty scope " + scope.name);
        CollectivitySeries series;
        series.scope = scope.name;
        try {
            RollingCorrelation roll(panel.returns, subset_indices(panel, scope.tickers), tau);
            Eigen::MatrixXd psi;
            Eigen::VectorXd warm;
            for (int t = tau; t <= t_total; ++t) {
                roll.seek(t);
                roll.current(psi);
                PowerOptions opts;
                if (warm.size() == psi.rows()) opts.warm_start = &warm;
                const EigenResult eig = leading_eigenpair(psi, opts);
                series.t_values.push_back(t);
                series.dates.push_back(panel.dates[static_cast<std::size_t>(t - 1)]);
                series.lambda1_norm.push_back(eig.normalized_lambda1);
                series.uniformity.push_back(uniformity(eig.v1));
                warm = eig.v1;
            }
        } catch (const Error& e) {
            throw Error(e.kind(), "scope '" + scope.name + "': " + e.what());
        }
        out.push_back(std::move(series));
    }
    return out;
}

}  // namespace marketdiag
