#include "cggm/graphs.hpp"

#include <cmath>
#include <vector>

#include "cggm/errors.hpp"
#include "cggm/rng.hpp"

namespace cggm {

namespace {

AdjacencyMatrix empty_adjacency(int K) {
    AdjacencyMatrix a;
    a.w = Eigen::MatrixXd::Zero(K, K);
    return a;
}

void add_edge(AdjacencyMatrix& a, int i, int j) {
    a.w(i, j) = a.w(j, i) = 1.0;
    ++a.edge_count;
}

}  // namespace

AdjacencyMatrix gen_scale_free(int K, std::uint64_t seed) {
    if (K < 2) throw DimensionError("gen_scale_free: need K >= 2");
    AdjacencyMatrix a = empty_adjacency(K);
    add_edge(a, 0, 1);

    Philox4x32 rng(seed);
    std::vector<double> degree(K, 0.0);
    degree[0] = degree[1] = 1.0;
    for (int t = 2; t < K; ++t) {
        // attach to i < t with probability degree_i / sum of degrees
        const int i = rng.next_weighted(degree.data(), t);
        add_edge(a, i, t);
        degree[i] += 1.0;
        degree[t] += 1.0;
    }
    return a;
}

AdjacencyMatrix gen_hub(int K, int group_size) {
    if (group_size != 5 && group_size != 6)
        throw DimensionError("gen_hub: group_size must be 5 or 6");
    if (K % group_size != 0)
        throw DimensionError("gen_hub: K must be divisible by group_size");
    AdjacencyMatrix a = empty_adjacency(K);
    for (int start = 0; start < K; start += group_size)
        for (int j = start + 1; j < start + group_size; ++j)
            add_edge(a, start, j);
    return a;
}

AdjacencyMatrix gen_band(int K, int bandwidth) {
    if (K < 2 || bandwidth < 1 || bandwidth >= K)
        throw DimensionError("gen_band: need K >= 2 and 1 <= bandwidth < K");
    AdjacencyMatrix a = empty_adjacency(K);
    for (int i = 0; i < K; ++i)
        for (int j = i + 1; j < K && j - i <= bandwidth; ++j)
            add_edge(a, i, j);
    return a;
}

Eigen::MatrixXd precision_from_adjacency(const AdjacencyMatrix& w, double c) {
    const int K = w.K();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(w.w);
    if (eig.info() != Eigen::Success)
        throw Error("precision_from_adjacency: eigendecomposition failed");
    const double shift = std::abs(eig.eigenvalues().minCoeff()) + 0.2;
    Eigen::MatrixXd theta = c * w.w + shift * Eigen::MatrixXd::Identity(K, K);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> check(theta);
    if (check.eigenvalues().minCoeff() <= 0.0)
        throw NotPositiveDefiniteError("precision_from_adjacency: result not positive definite");
    return theta;
}

GroundTruthEdges ground_truth(const LatentModel& model) {
    GroundTruthEdges g;
    const int K = model.K();
    for (int t = 0; t < K; ++t) {
        for (int k = t + 1; k < K; ++k) {
            if (model.theta(t, k) != 0.0) g.latent.emplace(t, k);
            if (std::abs(model.omega(t, k)) > 1e-8) g.average.emplace(t, k);
        }
    }
    return g;
}

}  // namespace cggm
