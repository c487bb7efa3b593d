#pragma once

#include <Eigen/Dense>
#include <vector>

#include "cggm/model.hpp"
#include "cggm/partition.hpp"

namespace cggm {

// Pairwise covariance-difference scores. v(a,b) is the largest studentized
// difference between rows a and b of the covariance over all probe pairs
// (c,d) avoiding a and b; it is zero in population exactly when a and b sit
// in the same cluster. Symmetric, nonnegative, zero diagonal.
struct CodMetric {
    Eigen::MatrixXd v;

    int d() const { return int(v.rows()); }
};

// Pre-clustering noise-variance estimate. For each variable a, b1 and b2 are
// the two variables closest to a under the V score; the estimate combines the
// four covariance entries so that the shared-cluster part cancels.
struct GammaTilde {
    Eigen::VectorXd diag;
    std::vector<int> b1;
    std::vector<int> b2;
};

// Result of matching an estimated partition's labels onto a reference.
// label_map takes an estimated cluster id to a reference-space id (estimated
// clusters beyond the best matching get fresh ids past the reference count),
// and labels is the estimated assignment rewritten through that map. labels
// is in reference numbering, so it is not re-canonicalized here; overlap is
// the number of variables on which it agrees with the reference.
struct AlignResult {
    std::vector<int> label_map;
    std::vector<int> labels;
    bool exact_match = false;
    int overlap = 0;
};

// Uncentered second-moment matrix (1/n) sum_i x_i x_i'. The model is mean
// zero, so no centering happens here; real data is centered once at ingestion.
Eigen::MatrixXd sample_covariance(const SampleMatrix& x);

// V(a,b) = max over c,d not in {a,b} of
//   |(S_ac - S_ad) - (S_bc - S_bd)| / sqrt(S_cc + S_dd - 2 S_cd),
// with 0/0 = 0. A probe pair whose squared denominator is <= 1e-12
// contributes nothing to the max (its numerator is either also ~0 or the
// pair is numerically unusable; either way it cannot certify a difference).
// Needs d >= 4 so every (a,b) has at least one probe pair.
CodMetric cod_metric(const Eigen::MatrixXd& sigma_hat);

// Threshold for cod_cluster: 2 * median over pairs c < d of
// sqrt(S_cc + S_dd - 2 S_cd) * sqrt(log(max(d,n))/n). The first factor is a
// data-driven scale for the studentized scores, the second the usual
// high-dimensional rate.
double default_cod_threshold(const Eigen::MatrixXd& sigma_hat, int n);

// Greedy linking: repeatedly take the smallest unassigned variable a as
// pivot and group it with every unassigned b having V(a,b) <= threshold.
// The number of clusters is determined by the data.
Partition cod_cluster(const CodMetric& v, double threshold);

// Noise variances estimated before any partition is known, from the two
// V-nearest neighbors of each variable. Needs d >= 3; at d = 3 the V score
// is undefined (no probe pairs) and all pairs are treated as ties.
GammaTilde estimate_gamma_tilde(const Eigen::MatrixXd& sigma_hat);

// Relabels `estimated` to agree with `reference` as much as possible. The
// best bijection between cluster ids is found exactly (assignment problem on
// the confusion matrix); exact_match means the partitions are identical up
// to that relabeling.
AlignResult align_partition(const Partition& estimated, const Partition& reference);

// Semidefinite-relaxation clustering interface. Not implemented: it needs an
// external SDP solver, and the covariance-difference path above is the
// supported estimator at every scale this library targets.
Partition pecok_cluster(const Eigen::MatrixXd& sigma_hat, int K);

}  // namespace cggm
