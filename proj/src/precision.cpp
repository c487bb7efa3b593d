#include "cggm/precision.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "cggm/covariance.hpp"
#include "cggm/errors.hpp"
#include "cggm/lp.hpp"

namespace cggm {

const char* graph_kind_name(GraphKind kind) {
    return kind == GraphKind::Average ? "average" : "latent";
}

double default_lambda(int K, int n) {
    if (K < 1 || n < 2) {
        throw DimensionError("default_lambda: need K >= 1 and n >= 2");
    }
    return 2.0 * std::sqrt(std::log(double(std::max(K, n))) / double(n));
}

ClimeColumn clime_column(const Eigen::MatrixXd& m_hat, int k, double lambda) {
    const int K = int(m_hat.rows());
    if (m_hat.cols() != K) {
        throw DimensionError("clime_column: matrix must be square");
    }
    if (k < 0 || k >= K) {
        throw DimensionError("clime_column: column index out of range");
    }
    if (lambda < 0.0) {
        throw DomainError("clime_column: lambda must be nonnegative");
    }
    Eigen::VectorXd ek = Eigen::VectorXd::Zero(K);
    ek(k) = 1.0;
    const L1Solution sol = l1_min_linf(m_hat, ek, lambda);
    ClimeColumn out;
    out.beta = sol.z;
    out.lambda = lambda;
    out.residual_inf_norm = sol.residual_inf;
    return out;
}

NuisanceProjection nuisance_projection(const Eigen::MatrixXd& m_hat, int t,
                                       double lambda_prime) {
    const int K = int(m_hat.rows());
    if (m_hat.cols() != K) {
        throw DimensionError("nuisance_projection: matrix must be square");
    }
    if (t < 0 || t >= K) {
        throw DimensionError("nuisance_projection: row index out of range");
    }
    if (lambda_prime < 0.0) {
        throw DomainError("nuisance_projection: lambda_prime must be nonnegative");
    }
    if (K < 2) {
        throw DimensionError("nuisance_projection: need K >= 2");
    }
    // Drop row/column t; the constraint reads ||M_sub w - m_t||_inf <= lambda'.
    Eigen::MatrixXd sub(K - 1, K - 1);
    Eigen::VectorXd target(K - 1);
    for (int i = 0, ii = 0; i < K; ++i) {
        if (i == t) continue;
        target(ii) = m_hat(i, t);
        for (int j = 0, jj = 0; j < K; ++j) {
            if (j == t) continue;
            sub(ii, jj) = m_hat(i, j);
            ++jj;
        }
        ++ii;
    }
    const L1Solution sol = l1_min_linf(sub, target, lambda_prime);
    NuisanceProjection out;
    out.w = sol.z;
    out.lambda_prime = lambda_prime;
    out.v = Eigen::VectorXd::Zero(K);
    out.v(t) = 1.0;
    for (int i = 0, ii = 0; i < K; ++i) {
        if (i == t) continue;
        out.v(i) = -sol.z(ii);
        ++ii;
    }
    return out;
}

double one_step_edge(const Eigen::MatrixXd& m_hat, const ClimeColumn& beta_k,
                     double beta_tt, const NuisanceProjection& proj, int t, int k) {
    const int K = int(m_hat.rows());
    if (beta_k.beta.size() != K || proj.v.size() != K) {
        throw DimensionError("one_step_edge: inconsistent dimensions");
    }
    if (t < 0 || t >= K || k < 0 || k >= K) {
        throw DimensionError("one_step_edge: index out of range");
    }
    Eigen::VectorXd residual = m_hat * beta_k.beta;
    residual(k) -= 1.0;
    const double h = proj.v.dot(residual);
    return beta_k.beta(t) - h * beta_tt;
}

double edge_std(double beta_tk, double beta_tt, double beta_kk) {
    const double var = beta_tk * beta_tk + beta_tt * beta_kk;
    if (!(var > 0.0)) {
        throw NonPositiveVarianceError(
            "edge_std: variance estimate " + std::to_string(var) +
            " is not positive");
    }
    return std::sqrt(var);
}

Eigen::MatrixXd plug_in_matrix(const SampleMatrix& x, const Partition& g_hat,
                               GraphKind kind) {
    if (kind == GraphKind::Average) {
        return averages_covariance(x, g_hat).s_hat;
    }
    return latent_covariance(x, g_hat).c_hat;
}

std::vector<EdgeInference> infer_graph(const SampleMatrix& x, const Partition& g_hat,
                                       GraphKind kind,
                                       const Eigen::VectorXd& lambda_per_column,
                                       const Eigen::VectorXd& lambda_per_projection) {
    const int K = g_hat.K;
    if (lambda_per_column.size() != K || lambda_per_projection.size() != K) {
        throw DimensionError("infer_graph: tuning vectors must have length K");
    }
    const Eigen::MatrixXd m_hat = plug_in_matrix(x, g_hat, kind);
    const double root_n = std::sqrt(double(x.rows()));
    const double nan = std::numeric_limits<double>::quiet_NaN();

    // Columns and projections are shared across edges, so solve each once and
    // remember failures; an edge is excluded when any piece it needs failed.
    std::vector<ClimeColumn> columns(static_cast<size_t>(K));
    std::vector<char> column_ok(size_t(K), 0);
    std::vector<NuisanceProjection> projections(static_cast<size_t>(K));
    std::vector<char> projection_ok(size_t(K), 0);
    for (int k = 0; k < K; ++k) {
        try {
            columns[size_t(k)] = clime_column(m_hat, k, lambda_per_column(k));
            column_ok[size_t(k)] = 1;
        } catch (const Error&) {
        }
    }
    for (int t = 0; t + 1 < K; ++t) {
        try {
            projections[size_t(t)] =
                nuisance_projection(m_hat, t, lambda_per_projection(t));
            projection_ok[size_t(t)] = 1;
        } catch (const Error&) {
        }
    }

    std::vector<EdgeInference> edges;
    edges.reserve(size_t(K) * (K - 1) / 2);
    for (int t = 0; t < K; ++t) {
        for (int k = t + 1; k < K; ++k) {
            EdgeInference e;
            e.t = t;
            e.k = k;
            e.graph_kind = kind;
            if (!column_ok[size_t(t)] || !column_ok[size_t(k)] ||
                !projection_ok[size_t(t)]) {
                e.estimate = nan;
                e.std_err = nan;
                e.stat = nan;
                e.excluded = true;
                edges.push_back(e);
                continue;
            }
            const double beta_tt = columns[size_t(t)].beta(t);
            const double beta_kk = columns[size_t(k)].beta(k);
            const double beta_tk = columns[size_t(k)].beta(t);
            e.estimate = one_step_edge(m_hat, columns[size_t(k)], beta_tt,
                                       projections[size_t(t)], t, k);
            try {
                e.std_err = edge_std(beta_tk, beta_tt, beta_kk);
                e.stat = root_n * e.estimate / e.std_err;
            } catch (const NonPositiveVarianceError&) {
                e.std_err = nan;
                e.stat = nan;
                e.excluded = true;
            }
            edges.push_back(e);
        }
    }
    return edges;
}

std::vector<EdgeInference> infer_graph(const SampleMatrix& x, const Partition& g_hat,
                                       GraphKind kind, double lambda,
                                       double lambda_prime) {
    const Eigen::VectorXd cols = Eigen::VectorXd::Constant(g_hat.K, lambda);
    const Eigen::VectorXd projs = Eigen::VectorXd::Constant(g_hat.K, lambda_prime);
    return infer_graph(x, g_hat, kind, cols, projs);
}

}  // namespace cggm
