#pragma once

#include <Eigen/Dense>
#include <vector>

#include "cggm/model.hpp"
#include "cggm/partition.hpp"

namespace cggm {

// Which precision matrix an inference targets: the graph of the cluster
// averages (plug-in S-hat) or the latent graph (plug-in C-hat with the
// diagonal noise correction).
enum class GraphKind { Average, Latent };

const char* graph_kind_name(GraphKind kind);

// One estimated precision column: the L1-minimal beta with
// ||M beta - e_k||_inf <= lambda.
struct ClimeColumn {
    Eigen::VectorXd beta;
    double lambda = 0.0;
    double residual_inf_norm = 0.0;
};

// Row-t nuisance fit: w minimizes ||w||_1 subject to
// ||M_{t,-t} - w' M_{-t,-t}||_inf <= lambda_prime, and v is the length-K
// contrast with v[t] = 1, v[-t] = -w. v'(M beta - e_k) is the de-correlated
// score used by the one-step update.
struct NuisanceProjection {
    Eigen::VectorXd w;
    Eigen::VectorXd v;
    double lambda_prime = 0.0;
};

// Per-edge inference record for t < k. When `excluded` is set the edge has
// no usable statistic (a solver failure or a non-positive variance estimate)
// and stat/std_err are NaN; excluded edges still count as hypotheses
// downstream but are never selected.
struct EdgeInference {
    int t = 0;
    int k = 0;
    double estimate = 0.0;
    double std_err = 0.0;
    double stat = 0.0;
    GraphKind graph_kind = GraphKind::Average;
    bool excluded = false;
};

// Default tuning value 2*sqrt(log(max(K,n))/n) for both lambda and
// lambda_prime.
double default_lambda(int K, int n);

ClimeColumn clime_column(const Eigen::MatrixXd& m_hat, int k, double lambda);

NuisanceProjection nuisance_projection(const Eigen::MatrixXd& m_hat, int t,
                                       double lambda_prime);

// One-step update of the initial entry beta_k[t]: subtracts the de-correlated
// score v'(M beta_k - e_k) scaled by beta_tt. Equal to the initial estimate
// when the column solves M beta = e_k exactly.
double one_step_edge(const Eigen::MatrixXd& m_hat, const ClimeColumn& beta_k,
                     double beta_tt, const NuisanceProjection& proj, int t, int k);

// sqrt(beta_tk^2 + beta_tt * beta_kk); throws NonPositiveVarianceError when
// the argument of the root is not positive (possible when an estimated
// diagonal goes negative).
double edge_std(double beta_tk, double beta_tt, double beta_kk);

// Full pipeline for one graph: builds the plug-in matrix for `kind`, solves
// each column and each row projection once, and assembles an EdgeInference
// per pair t < k. Column- or projection-level solver failures mark the edges
// that need them as excluded instead of aborting the graph.
std::vector<EdgeInference> infer_graph(const SampleMatrix& x, const Partition& g_hat,
                                       GraphKind kind, double lambda,
                                       double lambda_prime);

// Same, with a per-column lambda (entry k tunes column k and the row-t
// projection uses entry t).
std::vector<EdgeInference> infer_graph(const SampleMatrix& x, const Partition& g_hat,
                                       GraphKind kind,
                                       const Eigen::VectorXd& lambda_per_column,
                                       const Eigen::VectorXd& lambda_per_projection);

// The plug-in matrix infer_graph builds: S-hat for Average, C-hat for Latent.
Eigen::MatrixXd plug_in_matrix(const SampleMatrix& x, const Partition& g_hat,
                               GraphKind kind);

}  // namespace cggm
