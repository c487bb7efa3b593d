#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>
#include <utility>

#include "cggm/errors.hpp"
#include "cggm/graphs.hpp"
#include "cggm/model.hpp"
#include "cggm/rng.hpp"
#include "oracles.hpp"

using cggm::AdjacencyMatrix;
using cggm::gen_band;
using cggm::gen_hub;
using cggm::gen_scale_free;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

void check_adjacency_invariants(const AdjacencyMatrix& adj) {
    const int K = adj.K();
    int count = 0;
    for (int i = 0; i < K; ++i) {
        CHECK(adj.w(i, i) == 0.0);
        for (int j = 0; j < K; ++j) {
            CHECK((adj.w(i, j) == 0.0 || adj.w(i, j) == 1.0));
            CHECK(adj.w(i, j) == adj.w(j, i));
            if (i < j && adj.w(i, j) == 1.0) ++count;
        }
    }
    CHECK(count == adj.edge_count);
}

int max_degree(const AdjacencyMatrix& adj) {
    int best = 0;
    for (int i = 0; i < adj.K(); ++i)
        best = std::max(best, int(adj.w.row(i).sum()));
    return best;
}

}  // namespace

TEST_CASE("band edge counts") {
    CHECK(gen_band(100, 3).edge_count == 294);
    CHECK(gen_band(20, 3).edge_count == 54);
    CHECK(gen_band(4, 1).edge_count == 3);

    const AdjacencyMatrix path = gen_band(4, 1);
    CHECK(path.w(0, 1) == 1.0);
    CHECK(path.w(1, 2) == 1.0);
    CHECK(path.w(2, 3) == 1.0);
    CHECK(path.w(0, 2) == 0.0);
    check_adjacency_invariants(path);
    check_adjacency_invariants(gen_band(100, 3));

    // every |i-j| <= 3 pair and nothing else
    const AdjacencyMatrix b = gen_band(10, 3);
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 10; ++j)
            CHECK(b.w(i, j) == ((i != j && std::abs(i - j) <= 3) ? 1.0 : 0.0));

    CHECK_THROWS_AS(gen_band(1, 1), cggm::DimensionError);
    CHECK_THROWS_AS(gen_band(5, 0), cggm::DimensionError);
    CHECK_THROWS_AS(gen_band(5, 5), cggm::DimensionError);
}

TEST_CASE("hub edge counts and shapes") {
    CHECK(gen_hub(100, 5).edge_count == 80);

    const AdjacencyMatrix star = gen_hub(5, 5);
    CHECK(star.edge_count == 4);
    CHECK(int(star.w.row(0).sum()) == 4);
    check_adjacency_invariants(star);

    const AdjacencyMatrix h12 = gen_hub(12, 6);
    CHECK(h12.edge_count == 10);
    CHECK(max_degree(h12) == 5);
    check_adjacency_invariants(h12);

    CHECK_THROWS_AS(gen_hub(12, 4), cggm::DimensionError);
    CHECK_THROWS_AS(gen_hub(13, 5), cggm::DimensionError);
}

TEST_CASE("preferential attachment tree") {
    const AdjacencyMatrix k2 = gen_scale_free(2, 1);
    CHECK(k2.edge_count == 1);
    CHECK(k2.w(0, 1) == 1.0);

    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const AdjacencyMatrix g = gen_scale_free(50, seed);
        CHECK(g.edge_count == 49);
        check_adjacency_invariants(g);
    }

    // heavy tail: the hubbiest node collects far more than the mean degree
    double mean_max = 0.0, mean_deg = 0.0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const AdjacencyMatrix g = gen_scale_free(50, seed);
        mean_max += max_degree(g);
        mean_deg += 2.0 * g.edge_count / 50.0;
    }
    CHECK(mean_max / 100.0 > 2.0 * mean_deg / 100.0);

    // same seed, same graph
    CHECK(gen_scale_free(30, 77).w == gen_scale_free(30, 77).w);

    CHECK_THROWS_AS(gen_scale_free(1, 0), cggm::DimensionError);
}

TEST_CASE("precision from adjacency") {
    AdjacencyMatrix zero;
    zero.w = MatrixXd::Zero(3, 3);
    zero.edge_count = 0;
    const MatrixXd t0 = cggm::precision_from_adjacency(zero, 0.3);
    CHECK(t0.isApprox(0.2 * MatrixXd::Identity(3, 3), 1e-12));

    AdjacencyMatrix edge;
    edge.w = MatrixXd::Zero(2, 2);
    edge.w(0, 1) = edge.w(1, 0) = 1.0;
    edge.edge_count = 1;
    const MatrixXd t1 = cggm::precision_from_adjacency(edge, 0.3);
    CHECK(t1(0, 0) == doctest::Approx(1.2).epsilon(1e-10));
    CHECK(t1(1, 1) == doctest::Approx(1.2).epsilon(1e-10));
    CHECK(t1(0, 1) == doctest::Approx(0.3).epsilon(1e-10));

    const MatrixXd tb = cggm::precision_from_adjacency(gen_band(100, 3), 0.3);
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(tb);
    CHECK(es.eigenvalues().minCoeff() > 0.0);

    // a coupling strength above 1 loses definiteness on a single edge
    CHECK_THROWS_AS(cggm::precision_from_adjacency(edge, 5.0),
                    cggm::NotPositiveDefiniteError);
}

TEST_CASE("ground truth edge sets") {
    using cggm::build_model;
    using cggm::ground_truth;
    using cggm::Partition;

    // diagonal latent precision: both graphs empty
    VectorXd gamma4 = VectorXd::Constant(4, 0.3);
    const cggm::LatentModel diag =
        build_model(Partition::from_labels({0, 0, 1, 1}),
                    MatrixXd::Identity(2, 2), gamma4);
    const cggm::GroundTruthEdges e0 = ground_truth(diag);
    CHECK(e0.latent.empty());
    CHECK(e0.average.empty());

    // one latent edge survives into the averages graph (2x2 closed form:
    // the off-diagonal of S^{-1} is -S_01/det, nonzero whenever C_01 is)
    AdjacencyMatrix edge;
    edge.w = MatrixXd::Zero(2, 2);
    edge.w(0, 1) = edge.w(1, 0) = 1.0;
    edge.edge_count = 1;
    const MatrixXd theta = cggm::precision_from_adjacency(edge, 0.3);
    const cggm::LatentModel m2 =
        build_model(Partition::from_labels({0, 0, 1, 1}), theta, gamma4);
    const cggm::GroundTruthEdges e2 = ground_truth(m2);
    CHECK(e2.latent == std::set<std::pair<int, int>>{{0, 1}});
    CHECK(e2.average == std::set<std::pair<int, int>>{{0, 1}});

    // hub model: averages support cross-checked against an extended-precision
    // inverse of S
    const MatrixXd th = cggm::precision_from_adjacency(gen_hub(10, 5), 0.3);
    VectorXd gamma50 = VectorXd::Constant(50, 0.3);
    const cggm::LatentModel mh =
        build_model(Partition::round_robin(50, 10), th, gamma50);
    const cggm::GroundTruthEdges eh = ground_truth(mh);

    const MatrixXd sinv = oracle::invert_ld(mh.s);
    std::set<std::pair<int, int>> expected;
    for (int t = 0; t < 10; ++t)
        for (int k = t + 1; k < 10; ++k)
            if (std::abs(sinv(t, k)) > 1e-8) expected.insert({t, k});
    CHECK(eh.average == expected);

    std::set<std::pair<int, int>> latent_expected;
    for (int t = 0; t < 10; ++t)
        for (int k = t + 1; k < 10; ++k)
            if (th(t, k) != 0.0) latent_expected.insert({t, k});
    CHECK(eh.latent == latent_expected);
}
