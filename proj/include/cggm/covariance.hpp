#pragma once

#include <Eigen/Dense>

#include "cggm/model.hpp"
#include "cggm/partition.hpp"

namespace cggm {

// Covariance of the cluster averages, the plug-in input for the average
// graph.
struct AveragesCovariance {
    Eigen::MatrixXd s_hat;
};

// Latent-covariance estimate: c_hat is the averaged covariance with its
// diagonal de-biased by the per-variable noise estimates gamma_hat. gamma_hat
// can be negative in finite samples; it is kept as-is, since clipping would
// bias c_hat.
struct LatentCovariance {
    Eigen::MatrixXd c_hat;
    Eigen::VectorXd gamma_hat;
};

AveragesCovariance averages_covariance(const SampleMatrix& x, const Partition& g_hat);

// Same estimator computed from a d x d second-moment matrix instead of data.
// Feeding the population covariance returns S* exactly.
AveragesCovariance averages_covariance_from_cov(const Eigen::MatrixXd& sigma_hat,
                                                const Partition& g_hat);

// Per-variable noise variance: for i in cluster G of size m,
//   gamma_i = S_ii - (1/(m-1)) sum_{j in G, j != i} S_ij.
// Within a cluster the off-diagonal entries share the latent part, so the
// subtraction isolates the noise. Every cluster needs >= 2 members.
Eigen::VectorXd gamma_hat(const SampleMatrix& x, const Partition& g_hat);
Eigen::VectorXd gamma_hat_from_cov(const Eigen::MatrixXd& sigma_hat,
                                   const Partition& g_hat);

// c_hat_jk = mean over (a in G_j, b in G_k) of (S_ab - gamma_ab), with gamma
// the diagonal matrix from gamma_hat. Differs from s_hat only on the
// diagonal.
LatentCovariance latent_covariance(const SampleMatrix& x, const Partition& g_hat);
LatentCovariance latent_covariance_from_cov(const Eigen::MatrixXd& sigma_hat,
                                            const Partition& g_hat);

// Single-observation version of the latent-covariance estimate, used by the
// variance diagnostics: off-diagonal entries are products of cluster
// averages; the diagonal carries the same leave-one-out noise correction as
// c_hat, so the average of these matrices over a sample equals c_hat exactly.
Eigen::MatrixXd per_sample_latent(const Eigen::VectorXd& xi, const Partition& g);

}  // namespace cggm
