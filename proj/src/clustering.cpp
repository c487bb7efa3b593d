#include "cggm/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include "cggm/errors.hpp"

namespace cggm {
namespace {

constexpr double kDegenerateDenSq = 1e-12;

void require_square_symmetric(const Eigen::MatrixXd& m, const char* who) {
    if (m.rows() != m.cols()) {
        throw DimensionError(std::string(who) + ": matrix must be square");
    }
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-8 * scale) {
        throw DomainError(std::string(who) + ": matrix must be symmetric");
    }
}

}  // namespace

Eigen::MatrixXd sample_covariance(const SampleMatrix& x) {
    if (x.rows() < 2) {
        throw DimensionError("sample_covariance: need at least 2 observations");
    }
    Eigen::MatrixXd s = (x.transpose() * x) / double(x.rows());
    return (s + s.transpose()) / 2.0;
}

CodMetric cod_metric(const Eigen::MatrixXd& sigma_hat) {
    require_square_symmetric(sigma_hat, "cod_metric");
    const int d = int(sigma_hat.rows());
    if (d < 4) {
        throw DimensionError(
            "cod_metric: need d >= 4 so every pair has a probe pair");
    }

    // wgt(c,e) = 1/sqrt(S_cc + S_ee - 2 S_ce), or 0 when the squared
    // denominator is degenerate. Multiplying by a zero weight makes the probe
    // pair contribute 0, which under a max of nonnegative values is the same
    // as dropping it.
    const Eigen::ArrayXd diag = sigma_hat.diagonal().array();
    Eigen::ArrayXXd den_sq =
        diag.matrix().replicate(1, d).array() +
        diag.matrix().transpose().replicate(d, 1).array() -
        2.0 * sigma_hat.array();
    Eigen::ArrayXXd wgt =
        (den_sq > kDegenerateDenSq).select(den_sq.max(0.0).sqrt().inverse(), 0.0);

    CodMetric out;
    out.v = Eigen::MatrixXd::Zero(d, d);
    // One probe row at a time keeps memory at O(d) scratch per pair while the
    // inner work stays vectorized; no d^3 intermediate is ever built.
    Eigen::ArrayXd delta(d);
    Eigen::ArrayXd vals(d);
    for (int a = 0; a < d; ++a) {
        for (int b = a + 1; b < d; ++b) {
            delta = sigma_hat.row(a).array() - sigma_hat.row(b).array();
            double best = 0.0;
            for (int c = 0; c < d; ++c) {
                if (c == a || c == b) continue;
                vals = (delta(c) - delta).abs() * wgt.row(c).transpose();
                vals(a) = 0.0;
                vals(b) = 0.0;
                best = std::max(best, vals.maxCoeff());
            }
            out.v(a, b) = best;
            out.v(b, a) = best;
        }
    }
    return out;
}

double default_cod_threshold(const Eigen::MatrixXd& sigma_hat, int n) {
    require_square_symmetric(sigma_hat, "default_cod_threshold");
    if (n < 2) {
        throw DimensionError("default_cod_threshold: need n >= 2");
    }
    const int d = int(sigma_hat.rows());
    if (d < 2) {
        throw DimensionError("default_cod_threshold: need d >= 2");
    }
    std::vector<double> dens;
    dens.reserve(size_t(d) * (d - 1) / 2);
    for (int c = 0; c < d; ++c) {
        for (int e = c + 1; e < d; ++e) {
            const double den_sq =
                sigma_hat(c, c) + sigma_hat(e, e) - 2.0 * sigma_hat(c, e);
            dens.push_back(std::sqrt(std::max(den_sq, 0.0)));
        }
    }
    std::sort(dens.begin(), dens.end());
    const size_t half = dens.size() / 2;
    const double median = (dens.size() % 2 == 1)
                              ? dens[half]
                              : (dens[half - 1] + dens[half]) / 2.0;
    const double rate = std::sqrt(std::log(double(std::max(d, n))) / double(n));
    return 2.0 * median * rate;
}

Partition cod_cluster(const CodMetric& v, double threshold) {
    if (threshold < 0.0) {
        throw DomainError("cod_cluster: threshold must be nonnegative");
    }
    const int d = v.d();
    std::vector<int> labels(size_t(d), -1);
    int next = 0;
    for (int a = 0; a < d; ++a) {
        if (labels[a] != -1) continue;
        labels[a] = next;
        for (int b = a + 1; b < d; ++b) {
            if (labels[b] == -1 && v.v(a, b) <= threshold) {
                labels[b] = next;
            }
        }
        ++next;
    }
    return Partition::from_labels(labels);
}

GammaTilde estimate_gamma_tilde(const Eigen::MatrixXd& sigma_hat) {
    require_square_symmetric(sigma_hat, "estimate_gamma_tilde");
    const int d = int(sigma_hat.rows());
    if (d < 3) {
        throw DimensionError("estimate_gamma_tilde: need d >= 3");
    }
    // At d = 3 no probe pair exists, so every pair scores 0 and the neighbor
    // choice falls back to the index tie-break.
    const Eigen::MatrixXd v =
        d >= 4 ? cod_metric(sigma_hat).v : Eigen::MatrixXd::Zero(d, d);

    GammaTilde out;
    out.diag.resize(d);
    out.b1.resize(size_t(d));
    out.b2.resize(size_t(d));
    for (int a = 0; a < d; ++a) {
        int b1 = -1, b2 = -1;
        for (int b = 0; b < d; ++b) {
            if (b == a) continue;
            if (b1 == -1 || v(a, b) < v(a, b1)) b1 = b;
        }
        for (int b = 0; b < d; ++b) {
            if (b == a || b == b1) continue;
            if (b2 == -1 || v(a, b) < v(a, b2)) b2 = b;
        }
        out.b1[size_t(a)] = b1;
        out.b2[size_t(a)] = b2;
        out.diag(a) = sigma_hat(a, a) + sigma_hat(b1, b2) - sigma_hat(a, b1) -
                      sigma_hat(a, b2);
    }
    return out;
}

namespace {

// Exact max-weight assignment on a square gain matrix (potentials method,
// O(n^3)). Returns row -> column.
std::vector<int> assign_max(const std::vector<std::vector<std::int64_t>>& gain) {
    const int n = int(gain.size());
    const std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;
    std::vector<std::int64_t> u(size_t(n) + 1, 0), v(size_t(n) + 1, 0);
    std::vector<int> p(size_t(n) + 1, 0), way(size_t(n) + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<std::int64_t> minv(size_t(n) + 1, kInf);
        std::vector<char> used(size_t(n) + 1, 0);
        do {
            used[size_t(j0)] = 1;
            const int i0 = p[size_t(j0)];
            int j1 = 0;
            std::int64_t delta = kInf;
            for (int j = 1; j <= n; ++j) {
                if (used[size_t(j)]) continue;
                const std::int64_t cur =
                    -gain[size_t(i0) - 1][size_t(j) - 1] - u[size_t(i0)] - v[size_t(j)];
                if (cur < minv[size_t(j)]) {
                    minv[size_t(j)] = cur;
                    way[size_t(j)] = j0;
                }
                if (minv[size_t(j)] < delta) {
                    delta = minv[size_t(j)];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[size_t(j)]) {
                    u[size_t(p[size_t(j)])] += delta;
                    v[size_t(j)] -= delta;
                } else {
                    minv[size_t(j)] -= delta;
                }
            }
            j0 = j1;
        } while (p[size_t(j0)] != 0);
        do {
            const int j1 = way[size_t(j0)];
            p[size_t(j0)] = p[size_t(j1)];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<int> row_to_col(size_t(n), -1);
    for (int j = 1; j <= n; ++j) {
        if (p[size_t(j)] >= 1) row_to_col[size_t(p[size_t(j)]) - 1] = j - 1;
    }
    return row_to_col;
}

}  // namespace

AlignResult align_partition(const Partition& estimated, const Partition& reference) {
    if (estimated.d() != reference.d()) {
        throw DimensionError("align_partition: partitions cover different d");
    }
    const int d = estimated.d();
    const int ke = estimated.K;
    const int kr = reference.K;
    const int n = std::max(ke, kr);

    std::vector<std::vector<std::int64_t>> gain(
        size_t(n), std::vector<std::int64_t>(size_t(n), 0));
    for (int i = 0; i < d; ++i) {
        gain[size_t(estimated.labels[size_t(i)])]
            [size_t(reference.labels[size_t(i)])] += 1;
    }
    const std::vector<int> match = assign_max(gain);

    AlignResult out;
    out.label_map.resize(size_t(ke));
    int fresh = kr;
    for (int e = 0; e < ke; ++e) {
        const int target = match[size_t(e)];
        out.label_map[size_t(e)] = target < kr ? target : fresh++;
    }
    out.labels.resize(size_t(d));
    out.overlap = 0;
    for (int i = 0; i < d; ++i) {
        out.labels[size_t(i)] = out.label_map[size_t(estimated.labels[size_t(i)])];
        if (out.labels[size_t(i)] == reference.labels[size_t(i)]) ++out.overlap;
    }
    out.exact_match = (out.labels == reference.labels);
    return out;
}

Partition pecok_cluster(const Eigen::MatrixXd&, int) {
    throw NotImplementedError(
        "pecok_cluster: semidefinite-relaxation clustering is not implemented; "
        "use cod_cluster");
}

}  // namespace cggm
