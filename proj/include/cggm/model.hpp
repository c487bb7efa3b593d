#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "cggm/partition.hpp"

namespace cggm {

// Observations are rows: an n x d matrix of n independent draws.
using SampleMatrix = Eigen::MatrixXd;

// The block latent model X = A Z + E with Z ~ N(0, C), E ~ N(0, diag(gamma)),
// and A the 0/1 cluster membership matrix of `partition`. Two precision
// matrices carry the two graphs of interest:
//   theta = C^{-1}           : conditional-independence graph of Z
//   omega = (C + gamma_bar)^{-1} : graph of the within-cluster averages,
// where gamma_bar_k = (1/|G_k|^2) sum_{j in G_k} gamma_j.
// All derived matrices are computed once at construction.
struct LatentModel {
    Partition partition;
    Eigen::MatrixXd theta;      // K x K latent precision
    Eigen::VectorXd gamma;      // d noise variances, all > 0
    Eigen::MatrixXd c;          // K x K latent covariance, theta^{-1}
    Eigen::MatrixXd c_chol;     // lower Cholesky factor of c (used by sample)
    Eigen::VectorXd gamma_bar;  // K averaged noise contributions
    Eigen::MatrixXd s;          // K x K covariance of cluster averages
    Eigen::MatrixXd omega;      // K x K precision of cluster averages
    Eigen::MatrixXd sigma;      // d x d covariance of X

    int K() const { return int(theta.rows()); }
    int d() const { return int(gamma.size()); }
};

// Validates and assembles the model. theta must be symmetric with smallest
// eigenvalue > 1e-8, gamma strictly positive, and every cluster must have at
// least two members (identifiability of the noise variances).
LatentModel build_model(const Partition& partition, const Eigen::MatrixXd& theta,
                        const Eigen::VectorXd& gamma);

// n independent rows of X = A Z + E. Row i consumes K latent normals then d
// noise normals from a Philox4x32 stream, so output is reproducible given
// (seed, stream).
SampleMatrix sample(const LatentModel& model, int n, std::uint64_t seed,
                    std::uint64_t stream = 0);

// n x K matrix of within-cluster means of each observation.
Eigen::MatrixXd cluster_averages(const SampleMatrix& x, const Partition& partition);

}  // namespace cggm
