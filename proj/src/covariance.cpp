#include "cggm/covariance.hpp"

#include "cggm/clustering.hpp"
#include "cggm/errors.hpp"

namespace cggm {
namespace {

void require_dims(int cols, const Partition& g, const char* who) {
    if (cols != g.d()) {
        throw DimensionError(std::string(who) +
                             ": partition does not cover the columns");
    }
}

void require_min_size_two(const Partition& g, const char* who) {
    if (g.min_group_size() < 2) {
        throw SingletonClusterError(
            std::string(who) + ": every cluster needs at least 2 members");
    }
}

// K x d row-averaging matrix: row k has 1/|G_k| on the members of G_k.
Eigen::MatrixXd averaging_matrix(const Partition& g) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(g.K, g.d());
    for (int k = 0; k < g.K; ++k) {
        const double w = 1.0 / double(g.groups[size_t(k)].size());
        for (int i : g.groups[size_t(k)]) m(k, i) = w;
    }
    return m;
}

}  // namespace

AveragesCovariance averages_covariance(const SampleMatrix& x, const Partition& g_hat) {
    require_dims(int(x.cols()), g_hat, "averages_covariance");
    if (x.rows() < 1) {
        throw DimensionError("averages_covariance: need at least 1 observation");
    }
    const Eigen::MatrixXd avg = cluster_averages(x, g_hat);
    Eigen::MatrixXd s = (avg.transpose() * avg) / double(x.rows());
    return AveragesCovariance{(s + s.transpose()) / 2.0};
}

AveragesCovariance averages_covariance_from_cov(const Eigen::MatrixXd& sigma_hat,
                                                const Partition& g_hat) {
    require_dims(int(sigma_hat.rows()), g_hat, "averages_covariance_from_cov");
    const Eigen::MatrixXd m = averaging_matrix(g_hat);
    Eigen::MatrixXd s = m * sigma_hat * m.transpose();
    return AveragesCovariance{(s + s.transpose()) / 2.0};
}

Eigen::VectorXd gamma_hat_from_cov(const Eigen::MatrixXd& sigma_hat,
                                   const Partition& g_hat) {
    require_dims(int(sigma_hat.rows()), g_hat, "gamma_hat_from_cov");
    require_min_size_two(g_hat, "gamma_hat_from_cov");
    Eigen::VectorXd gamma(g_hat.d());
    for (int k = 0; k < g_hat.K; ++k) {
        const auto& group = g_hat.groups[size_t(k)];
        const double m = double(group.size());
        for (int i : group) {
            double cross = 0.0;
            for (int j : group) cross += sigma_hat(i, j);
            cross -= sigma_hat(i, i);
            gamma(i) = sigma_hat(i, i) - cross / (m - 1.0);
        }
    }
    return gamma;
}

Eigen::VectorXd gamma_hat(const SampleMatrix& x, const Partition& g_hat) {
    return gamma_hat_from_cov(sample_covariance(x), g_hat);
}

LatentCovariance latent_covariance_from_cov(const Eigen::MatrixXd& sigma_hat,
                                            const Partition& g_hat) {
    LatentCovariance out;
    out.gamma_hat = gamma_hat_from_cov(sigma_hat, g_hat);
    out.c_hat = averages_covariance_from_cov(sigma_hat, g_hat).s_hat;
    for (int k = 0; k < g_hat.K; ++k) {
        const auto& group = g_hat.groups[size_t(k)];
        double total = 0.0;
        for (int i : group) total += out.gamma_hat(i);
        const double m = double(group.size());
        out.c_hat(k, k) -= total / (m * m);
    }
    return out;
}

LatentCovariance latent_covariance(const SampleMatrix& x, const Partition& g_hat) {
    // The base matrix comes from averages_covariance, not from the d x d
    // second moment, so the two data-path estimators share their
    // off-diagonal entries bitwise and differ only in the diagonal
    // correction below.
    LatentCovariance out;
    out.gamma_hat = gamma_hat(x, g_hat);
    out.c_hat = averages_covariance(x, g_hat).s_hat;
    for (int k = 0; k < g_hat.K; ++k) {
        const auto& group = g_hat.groups[size_t(k)];
        double total = 0.0;
        for (int i : group) total += out.gamma_hat(i);
        const double m = double(group.size());
        out.c_hat(k, k) -= total / (m * m);
    }
    return out;
}

Eigen::MatrixXd per_sample_latent(const Eigen::VectorXd& xi, const Partition& g) {
    require_dims(int(xi.size()), g, "per_sample_latent");
    require_min_size_two(g, "per_sample_latent");
    const int K = g.K;
    Eigen::VectorXd xbar(K);
    Eigen::VectorXd correction(K);
    for (int k = 0; k < K; ++k) {
        const auto& group = g.groups[size_t(k)];
        const double m = double(group.size());
        double sx = 0.0, sq = 0.0;
        for (int i : group) {
            sx += xi(i);
            sq += xi(i) * xi(i);
        }
        xbar(k) = sx / m;
        // Sum over the cluster of x_a^2 - (1/(m-1)) sum_{j != a} x_a x_j,
        // divided by m^2: the one-observation version of the gamma_hat
        // de-biasing, so that averaging these matrices reproduces c_hat.
        correction(k) = (m * sq - sx * sx) / ((m - 1.0) * m * m);
    }
    Eigen::MatrixXd out = xbar * xbar.transpose();
    out.diagonal() -= correction;
    return out;
}

}  // namespace cggm
