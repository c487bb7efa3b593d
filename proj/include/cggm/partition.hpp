#pragma once

#include <vector>

namespace cggm {

// A partition of variables {0,...,d-1} into clusters labeled 0..K-1.
// Labels are canonical: cluster 0 is the one containing the smallest variable
// index, cluster 1 the next new cluster by first occurrence, and so on. Every
// label in [0,K) is used. Construction goes through from_labels so the
// canonical form and the group index are always consistent.
//
// Clusters of size 1 are representable; estimators that need >= 2 members per
// cluster (the latent-covariance correction and model building) check and
// throw SingletonClusterError themselves.
struct Partition {
    std::vector<int> labels;               // size d, values in [0, K)
    int K = 0;
    std::vector<std::vector<int>> groups;  // groups[k] = ascending member indices

    int d() const { return int(labels.size()); }
    int min_group_size() const;
    std::vector<int> group_sizes() const;

    // Canonicalizes arbitrary integer labels by first occurrence.
    static Partition from_labels(const std::vector<int>& raw);

    // labels[i] = i mod K: K clusters whose sizes differ by at most one.
    static Partition round_robin(int d, int K);
};

bool operator==(const Partition& a, const Partition& b);

}  // namespace cggm
