#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "cggm/fdr.hpp"
#include "cggm/model.hpp"
#include "cggm/partition.hpp"
#include "cggm/precision.hpp"

namespace cggm {

inline constexpr const char* kLibraryVersion = "0.1.0";

enum class Topology { ScaleFree, Hub, Band3 };

const char* topology_name(Topology topology);

enum class TuningMode { Fixed, CrossValidation };

// Full description of a simulation run. NaN in cod_threshold, lambda or
// lambda_prime means "derive the default from the data dimensions".
struct ExperimentConfig {
    int d = 100;
    int n = 800;
    int K = 20;
    Topology topology = Topology::Band3;
    double signal_c = 0.3;
    int hub_group_size = 5;
    std::vector<double> alphas{0.05, 0.1, 0.2};
    std::vector<Method> methods{Method::BY, Method::BH};
    std::vector<GraphKind> kinds{GraphKind::Average, GraphKind::Latent};
    int replications = 100;
    std::uint64_t base_seed = 1;
    bool use_true_partition = false;
    double cod_threshold = std::numeric_limits<double>::quiet_NaN();
    TuningMode tuning = TuningMode::Fixed;
    double lambda = std::numeric_limits<double>::quiet_NaN();
    double lambda_prime = std::numeric_limits<double>::quiet_NaN();
    int cv_folds = 5;
    std::vector<double> cv_grid;  // empty: default_lambda x {1/4, 1/2, 1, 2, 4}
    bool cv_per_column = false;
    bool cv_two_dim = false;
    int threads = 0;  // 0: one per hardware thread
};

struct CellResult {
    GraphKind kind = GraphKind::Average;
    Method method = Method::BY;
    double alpha = 0.0;
    double fdr = 0.0;
    double power = 0.0;
    double runtime_sec = 0.0;
};

struct ReplicationRecord {
    int index = 0;
    std::uint64_t seed = 0;
    bool failed = false;
    std::string failure;
    bool exact_cluster_recovery = false;
    int estimated_k = 0;
    int latent_edge_count = 0;
    double runtime_sec = 0.0;
    std::vector<CellResult> cells;
};

struct AggregateRow {
    GraphKind kind = GraphKind::Average;
    Method method = Method::BY;
    double alpha = 0.0;
    Topology topology = Topology::Band3;
    int K = 0;
    int m = 0;  // intended smallest cluster size, floor(d/K)
    double mean_fdr = 0.0;
    double mean_power = 0.0;
    int n_fail = 0;
};

struct ExperimentResult {
    ExperimentConfig config;
    std::vector<ReplicationRecord> records;
    std::vector<AggregateRow> table;
};

// Runs config.replications independent replications (seed = base_seed +
// index), each generating a model, sampling, clustering, inferring the
// requested graphs and scoring every (kind, method, alpha) cell, then
// averages the cells over the successful replications. Replications run on a
// shared worker pool; results are folded in index order, so the output is
// identical no matter how many threads run or in which order they finish.
ExperimentResult run_experiment(const ExperimentConfig& config);

struct CvOptions {
    bool per_column = false;    // separate minimizer per precision column
    bool two_dimensional = false;  // tune lambda_prime on the projection risk
    std::uint64_t seed = 0;     // fold-assignment shuffle seed
};

struct CvChoice {
    double lambda = 0.0;
    double lambda_prime = 0.0;
    Eigen::VectorXd per_column;  // filled only when requested
};

// K-fold cross-validation of the column tuning value: for each grid value,
// columns fitted on the training folds are scored by the held-out quadratic
// risk (1/2) b' M_val b - b_k, averaged over columns and folds; the grid
// minimizer wins (first one in grid order on ties). lambda_prime is tied to
// lambda unless two_dimensional, which tunes it separately on the analogous
// held-out projection risk.
CvChoice cross_validate(const SampleMatrix& x, const Partition& g_hat,
                        GraphKind kind, int folds, const std::vector<double>& grid,
                        const CvOptions& options = {});

// Reads a rectangular numeric CSV (rows = observations, optional header row,
// auto-detected) and returns the column-centered data matrix. Blank or
// malformed lines raise ParseError naming the location.
SampleMatrix ingest_csv(const std::string& path);

enum class ExportFormat { EdgeList, Dot };

// edge_list: "t,k,estimate,stat" header plus one line per selected edge.
// dot: undirected graph whose nodes are the clusters of g_hat, labeled with
// cluster id and size.
void export_graph(const FdrReport& report, const Partition& g_hat,
                  const std::string& path, ExportFormat format);

// Flat key=value config text (one pair per line, '#' comments). Keys mirror
// the CLI flags; unknown keys or unparsable values raise ConfigError.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

// Applies one key=value pair to a config (the CLI funnels flag overrides
// through this so file and flag values get identical validation).
void apply_config_entry(ExperimentConfig& config, const std::string& key,
                        const std::string& value);

// Sanity checks run_experiment performs up front; exposed so the CLI can
// report violations before doing any work.
void validate_config(const ExperimentConfig& config);

// Aggregate table as CSV with columns
// graph_kind,method,alpha,topology,K,m,mean_fdr,mean_power,n_fail.
void write_aggregate_csv(const ExperimentResult& result, const std::string& path);

// JSON document with the config echo, library version, aggregate rows and
// per-replication summaries.
std::string summary_json(const ExperimentResult& result);

}  // namespace cggm
