#include "cggm/partition.hpp"

#include <algorithm>
#include <unordered_map>

#include "cggm/errors.hpp"

namespace cggm {

int Partition::min_group_size() const {
    int m = d();
    for (const auto& g : groups) m = std::min(m, int(g.size()));
    return m;
}

std::vector<int> Partition::group_sizes() const {
    std::vector<int> s(groups.size());
    for (size_t k = 0; k < groups.size(); ++k) s[k] = int(groups[k].size());
    return s;
}

Partition Partition::from_labels(const std::vector<int>& raw) {
    if (raw.empty()) throw DimensionError("partition: no variables");
    Partition p;
    p.labels.resize(raw.size());
    std::unordered_map<int, int> relabel;
    for (size_t i = 0; i < raw.size(); ++i) {
        auto [it, inserted] = relabel.try_emplace(raw[i], int(relabel.size()));
        const int k = it->second;
        p.labels[i] = k;
        if (inserted) p.groups.emplace_back();
        p.groups[k].push_back(int(i));
    }
    p.K = int(p.groups.size());
    return p;
}

Partition Partition::round_robin(int d, int K) {
    if (d < 1 || K < 1 || K > d)
        throw DimensionError("round_robin: need 1 <= K <= d");
    std::vector<int> labels(d);
    for (int i = 0; i < d; ++i) labels[i] = i % K;
    return from_labels(labels);
}

bool operator==(const Partition& a, const Partition& b) {
    return a.labels == b.labels;
}

}  // namespace cggm
