#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <set>
#include <utility>

#include "cggm/model.hpp"

namespace cggm {

// Symmetric 0/1 adjacency with zero diagonal.
struct AdjacencyMatrix {
    Eigen::MatrixXd w;
    int edge_count = 0;

    int K() const { return int(w.rows()); }
};

// Edge sets (t, k) with t < k for the two graphs of a model. Latent edges are
// the exact off-diagonal support of theta; average-graph edges are entries of
// omega with magnitude above 1e-8 (the inverse of a dense covariance has no
// exact zeros, so a numerical threshold defines the support).
struct GroundTruthEdges {
    std::set<std::pair<int, int>> latent;
    std::set<std::pair<int, int>> average;
};

// Preferential attachment: start from a 2-node chain; each node t = 2..K-1
// attaches one edge to an existing node picked with probability proportional
// to its current degree. Yields K-1 edges and a heavy-tailed degree sequence.
AdjacencyMatrix gen_scale_free(int K, std::uint64_t seed);

// K nodes split into consecutive groups of group_size (5 or 6); the first
// node of each group is its hub, connected to the rest. K(N-1)/N edges.
AdjacencyMatrix gen_hub(int K, int group_size);

// Edge between i and j iff |i - j| <= bandwidth.
AdjacencyMatrix gen_band(int K, int bandwidth);

// theta = c*W + (|lambda_min(W)| + 0.2) I, positive definite by construction
// for c <= ~1; verified and rejected otherwise.
Eigen::MatrixXd precision_from_adjacency(const AdjacencyMatrix& w, double c);

GroundTruthEdges ground_truth(const LatentModel& model);

}  // namespace cggm
