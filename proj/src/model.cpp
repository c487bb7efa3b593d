#include "cggm/model.hpp"

#include <cmath>

#include "cggm/errors.hpp"
#include "cggm/rng.hpp"

namespace cggm {

LatentModel build_model(const Partition& partition, const Eigen::MatrixXd& theta,
                        const Eigen::VectorXd& gamma) {
    const int K = partition.K;
    const int d = partition.d();
    if (theta.rows() != K || theta.cols() != K)
        throw DimensionError("build_model: theta must be K x K");
    if (gamma.size() != d)
        throw DimensionError("build_model: gamma must have one entry per variable");
    if (partition.min_group_size() < 2)
        throw SingletonClusterError("build_model: every cluster needs >= 2 members");

    const double scale = std::max(1.0, theta.cwiseAbs().maxCoeff());
    if ((theta - theta.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
        throw NotPositiveDefiniteError("build_model: theta is not symmetric");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(theta);
    if (eig.info() != Eigen::Success || eig.eigenvalues().minCoeff() <= 1e-8)
        throw NotPositiveDefiniteError("build_model: theta is not positive definite");
    if (gamma.minCoeff() <= 0.0)
        throw NotPositiveDefiniteError("build_model: noise variances must be positive");

    LatentModel m;
    m.partition = partition;
    m.theta = theta;
    m.gamma = gamma;

    Eigen::LLT<Eigen::MatrixXd> llt_theta(theta);
    if (llt_theta.info() != Eigen::Success)
        throw NotPositiveDefiniteError("build_model: Cholesky of theta failed");
    m.c = llt_theta.solve(Eigen::MatrixXd::Identity(K, K));
    m.c = 0.5 * (m.c + m.c.transpose()).eval();  // kill asymmetric roundoff

    Eigen::LLT<Eigen::MatrixXd> llt_c(m.c);
    if (llt_c.info() != Eigen::Success)
        throw NotPositiveDefiniteError("build_model: Cholesky of the latent covariance failed");
    m.c_chol = llt_c.matrixL();

    m.gamma_bar.resize(K);
    for (int k = 0; k < K; ++k) {
        double sum = 0.0;
        for (int j : partition.groups[k]) sum += gamma[j];
        const double mk = double(partition.groups[k].size());
        m.gamma_bar[k] = sum / (mk * mk);
    }
    m.s = m.c;
    m.s.diagonal() += m.gamma_bar;

    Eigen::LLT<Eigen::MatrixXd> llt_s(m.s);
    if (llt_s.info() != Eigen::Success)
        throw NotPositiveDefiniteError("build_model: covariance of averages not positive definite");
    m.omega = llt_s.solve(Eigen::MatrixXd::Identity(K, K));
    m.omega = 0.5 * (m.omega + m.omega.transpose()).eval();

    m.sigma.resize(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            m.sigma(i, j) = m.c(partition.labels[i], partition.labels[j]);
    m.sigma.diagonal() += gamma;

    return m;
}

SampleMatrix sample(const LatentModel& model, int n, std::uint64_t seed,
                    std::uint64_t stream) {
    if (n < 1) throw DimensionError("sample: n must be >= 1");
    const int K = model.K(), d = model.d();
    Philox4x32 rng(seed, stream);

    SampleMatrix x(n, d);
    Eigen::VectorXd zraw(K), z(K);
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < K; ++k) zraw[k] = rng.next_normal();
        z.noalias() = model.c_chol * zraw;
        for (int j = 0; j < d; ++j)
            x(i, j) = z[model.partition.labels[j]] +
                      std::sqrt(model.gamma[j]) * rng.next_normal();
    }
    return x;
}

Eigen::MatrixXd cluster_averages(const SampleMatrix& x, const Partition& partition) {
    if (x.cols() != partition.d())
        throw DimensionError("cluster_averages: column count differs from partition size");
    const int n = int(x.rows()), K = partition.K;
    Eigen::MatrixXd avg = Eigen::MatrixXd::Zero(n, K);
    for (int k = 0; k < K; ++k) {
        for (int j : partition.groups[k]) avg.col(k) += x.col(j);
        avg.col(k) /= double(partition.groups[k].size());
    }
    return avg;
}

}  // namespace cggm
