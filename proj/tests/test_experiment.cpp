#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "cggm/errors.hpp"
#include "cggm/experiment.hpp"
#include "cggm/graphs.hpp"
#include "cggm/model.hpp"
#include "cggm/precision.hpp"
#include "cggm/rng.hpp"

using cggm::apply_config_entry;
using cggm::cross_validate;
using cggm::CvOptions;
using cggm::ExperimentConfig;
using cggm::ExperimentResult;
using cggm::GraphKind;
using cggm::ingest_csv;
using cggm::Method;
using cggm::parse_config_text;
using cggm::Partition;
using cggm::run_experiment;
using cggm::Topology;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

// scratch file helper; everything lands in the system temp dir
struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name, const std::string& content = "") {
        path = (std::filesystem::temp_directory_path() /
                ("cggm_test_" + name))
                   .string();
        if (!content.empty()) {
            std::ofstream out(path);
            out << content;
        }
    }
    ~TempFile() { std::remove(path.c_str()); }
};

ExperimentConfig tiny_config() {
    ExperimentConfig cfg;
    cfg.d = 12;
    cfg.n = 150;
    cfg.K = 4;
    cfg.topology = Topology::Band3;
    cfg.alphas = {0.1};
    cfg.methods = {Method::BY, Method::BH};
    cfg.kinds = {GraphKind::Average, GraphKind::Latent};
    cfg.replications = 2;
    cfg.base_seed = 11;
    cfg.threads = 1;
    return cfg;
}

bool records_identical(const ExperimentResult& a, const ExperimentResult& b) {
    if (a.records.size() != b.records.size()) return false;
    for (size_t i = 0; i < a.records.size(); ++i) {
        const cggm::ReplicationRecord& ra = a.records[i];
        const cggm::ReplicationRecord& rb = b.records[i];
        if (ra.seed != rb.seed || ra.failed != rb.failed ||
            ra.exact_cluster_recovery != rb.exact_cluster_recovery ||
            ra.estimated_k != rb.estimated_k ||
            ra.latent_edge_count != rb.latent_edge_count ||
            ra.cells.size() != rb.cells.size())
            return false;
        for (size_t c = 0; c < ra.cells.size(); ++c) {
            if (ra.cells[c].fdr != rb.cells[c].fdr ||
                ra.cells[c].power != rb.cells[c].power)
                return false;
        }
    }
    return true;
}

// minimal checker for the undirected-graph subset of the dot language that
// export_graph emits: graph IDENT { (node | edge)* }
bool dot_well_formed(const std::string& text) {
    std::vector<std::string> tokens;
    for (size_t i = 0; i < text.size();) {
        const char ch = text[i];
        if (std::isspace(static_cast<unsigned char>(ch))) {
            ++i;
            continue;
        }
        if (ch == '{' || ch == '}' || ch == ';') {
            tokens.emplace_back(1, ch);
            ++i;
            continue;
        }
        if (ch == '[') {  // attribute block, swallow to the closing bracket
            const size_t end = text.find(']', i);
            if (end == std::string::npos) return false;
            tokens.emplace_back("[attr]");
            i = end + 1;
            continue;
        }
        if (ch == '-' && i + 1 < text.size() && text[i + 1] == '-') {
            tokens.emplace_back("--");
            i += 2;
            continue;
        }
        if (std::isalnum(static_cast<unsigned char>(ch)) || ch == '_') {
            size_t j = i;
            while (j < text.size() &&
                   (std::isalnum(static_cast<unsigned char>(text[j])) ||
                    text[j] == '_'))
                ++j;
            tokens.push_back(text.substr(i, j - i));
            i = j;
            continue;
        }
        return false;  // unexpected character outside an attribute block
    }
    size_t pos = 0;
    const auto eat = [&](const std::string& want) {
        if (pos < tokens.size() && tokens[pos] == want) {
            ++pos;
            return true;
        }
        return false;
    };
    if (!eat("graph")) return false;
    if (pos >= tokens.size()) return false;
    ++pos;  // graph name
    if (!eat("{")) return false;
    while (pos < tokens.size() && tokens[pos] != "}") {
        // node id
        if (!std::isalpha(static_cast<unsigned char>(tokens[pos][0]))) return false;
        ++pos;
        if (eat("--")) {
            if (pos >= tokens.size()) return false;
            ++pos;  // second endpoint
        } else {
            eat("[attr]");  // optional label block
        }
        if (!eat(";")) return false;
    }
    return eat("}") && pos == tokens.size();
}

}  // namespace

TEST_CASE("config text covers every key") {
    const std::string text =
        "# comment line\n"
        "d = 24\n"
        "n = 300\n"
        "k = 6\n"
        "topology = hub\n"
        "c = 0.4\n"
        "hub_group_size = 6\n"
        "alpha = 0.05, 0.1\n"
        "method = bh\n"
        "graph = latent\n"
        "replications = 7\n"
        "seed = 99\n"
        "true_partition = yes\n"
        "cod_threshold = 0.5\n"
        "tuning = cv\n"
        "lambda = auto\n"
        "lambda_prime = 0.25\n"
        "folds = 4\n"
        "grid = 0.1, 0.2, 0.4\n"
        "cv_per_column = false\n"
        "cv_two_dim = true\n"
        "threads = 3\n";
    const ExperimentConfig cfg = parse_config_text(text);
    CHECK(cfg.d == 24);
    CHECK(cfg.n == 300);
    CHECK(cfg.K == 6);
    CHECK(cfg.topology == Topology::Hub);
    CHECK(cfg.signal_c == 0.4);
    CHECK(cfg.hub_group_size == 6);
    CHECK(cfg.alphas == std::vector<double>{0.05, 0.1});
    CHECK(cfg.methods == std::vector<Method>{Method::BH});
    CHECK(cfg.kinds == std::vector<GraphKind>{GraphKind::Latent});
    CHECK(cfg.replications == 7);
    CHECK(cfg.base_seed == 99);
    CHECK(cfg.use_true_partition);
    CHECK(cfg.cod_threshold == 0.5);
    CHECK(cfg.tuning == cggm::TuningMode::CrossValidation);
    CHECK(std::isnan(cfg.lambda));
    CHECK(cfg.lambda_prime == 0.25);
    CHECK(cfg.cv_folds == 4);
    CHECK(cfg.cv_grid == std::vector<double>{0.1, 0.2, 0.4});
    CHECK_FALSE(cfg.cv_per_column);
    CHECK(cfg.cv_two_dim);
    CHECK(cfg.threads == 3);
}

TEST_CASE("config errors name the offender") {
    ExperimentConfig cfg;
    CHECK_THROWS_AS(apply_config_entry(cfg, "bogus", "1"), cggm::ConfigError);
    CHECK_THROWS_AS(apply_config_entry(cfg, "d", "abc"), cggm::ConfigError);
    CHECK_THROWS_AS(apply_config_entry(cfg, "d", "2.5"), cggm::ConfigError);
    CHECK_THROWS_AS(apply_config_entry(cfg, "topology", "ring"), cggm::ConfigError);
    CHECK_THROWS_AS(apply_config_entry(cfg, "method", "holm"), cggm::ConfigError);
    CHECK_THROWS_AS(apply_config_entry(cfg, "true_partition", "maybe"),
                    cggm::ConfigError);
    CHECK_THROWS_AS(parse_config_text("d: 12\n"), cggm::ConfigError);
    CHECK_THROWS_AS(cggm::parse_config_file("/nonexistent/path.cfg"),
                    cggm::ConfigError);
}

TEST_CASE("config validation") {
    ExperimentConfig cfg = tiny_config();
    cfg.replications = 0;
    CHECK_THROWS_AS(cggm::validate_config(cfg), cggm::ConfigError);

    cfg = tiny_config();
    cfg.alphas = {1.5};
    CHECK_THROWS_AS(cggm::validate_config(cfg), cggm::ConfigError);

    cfg = tiny_config();
    cfg.K = 40;  // d < K
    CHECK_THROWS_AS(cggm::validate_config(cfg), cggm::ConfigError);

    cfg = tiny_config();
    cfg.topology = Topology::Hub;
    cfg.K = 4;
    cfg.hub_group_size = 5;
    CHECK_THROWS_AS(cggm::validate_config(cfg), cggm::ConfigError);

    cfg = tiny_config();
    cfg.tuning = cggm::TuningMode::CrossValidation;
    cfg.cv_folds = 1;
    CHECK_THROWS_AS(cggm::validate_config(cfg), cggm::ConfigError);

    CHECK_NOTHROW(cggm::validate_config(tiny_config()));
}

TEST_CASE("experiments replay exactly, whatever the thread count") {
    const ExperimentConfig cfg = tiny_config();
    const ExperimentResult a = run_experiment(cfg);
    const ExperimentResult b = run_experiment(cfg);
    CHECK(records_identical(a, b));

    ExperimentConfig threaded = cfg;
    threaded.threads = 3;
    const ExperimentResult c = run_experiment(threaded);
    CHECK(records_identical(a, c));

    REQUIRE(a.table.size() == 4);  // 2 kinds x 2 methods x 1 alpha
    for (const cggm::AggregateRow& row : a.table) {
        CHECK(row.n_fail == 0);
        CHECK(row.mean_fdr >= 0.0);
        CHECK(row.mean_power >= 0.0);
        CHECK(row.m == 3);
    }

    // different base seed, different data
    ExperimentConfig reseeded = cfg;
    reseeded.base_seed = 12;
    const ExperimentResult d = run_experiment(reseeded);
    CHECK_FALSE(records_identical(a, d));
}

TEST_CASE("a hundred-cluster band carries its full edge count") {
    ExperimentConfig cfg;
    cfg.d = 200;
    cfg.n = 60;
    cfg.K = 100;
    cfg.topology = Topology::Band3;
    cfg.alphas = {0.1};
    cfg.methods = {Method::BY};
    cfg.kinds = {GraphKind::Average};
    cfg.replications = 2;
    cfg.base_seed = 5;
    cfg.use_true_partition = true;
    cfg.threads = 1;
    const ExperimentResult res = run_experiment(cfg);
    for (const cggm::ReplicationRecord& rec : res.records) {
        REQUIRE_FALSE(rec.failed);
        CHECK(rec.latent_edge_count == 294);
        CHECK(rec.estimated_k == 100);
        CHECK(rec.exact_cluster_recovery);
    }
}

TEST_CASE("failures are recorded, not fatal") {
    ExperimentConfig cfg = tiny_config();
    cfg.K = 3;
    cfg.d = 12;  // band3 needs more nodes than the bandwidth
    const ExperimentResult res = run_experiment(cfg);
    for (const cggm::ReplicationRecord& rec : res.records) {
        CHECK(rec.failed);
        CHECK_FALSE(rec.failure.empty());
        CHECK(rec.cells.empty());
    }
    for (const cggm::AggregateRow& row : res.table) {
        CHECK(row.n_fail == cfg.replications);
        CHECK(row.mean_fdr == 0.0);
    }
}

TEST_CASE("an absurd linking threshold folds everything into one cluster") {
    ExperimentConfig cfg = tiny_config();
    cfg.cod_threshold = 1e6;
    const ExperimentResult res = run_experiment(cfg);
    for (const cggm::ReplicationRecord& rec : res.records) {
        REQUIRE_FALSE(rec.failed);
        CHECK(rec.estimated_k == 1);
        CHECK_FALSE(rec.exact_cluster_recovery);
        for (const cggm::CellResult& cell : rec.cells) {
            CHECK(cell.fdr == 0.0);  // one cluster, no edges to select
            CHECK(cell.power == 0.0);
        }
    }
}

TEST_CASE("cross-validation basics") {
    const MatrixXd theta =
        cggm::precision_from_adjacency(cggm::gen_band(4, 3), 0.3);
    cggm::Philox4x32 g(3, 2);
    VectorXd gamma(12);
    for (int i = 0; i < 12; ++i) gamma(i) = g.next_uniform(0.25, 0.5);
    const cggm::LatentModel m =
        cggm::build_model(Partition::round_robin(12, 4), theta, gamma);
    const cggm::SampleMatrix x = cggm::sample(m, 200, 17, 3);

    CvOptions opt;
    opt.seed = 4;

    const cggm::CvChoice single =
        cross_validate(x, m.partition, GraphKind::Average, 5, {0.3}, opt);
    CHECK(single.lambda == 0.3);
    CHECK(single.lambda_prime == 0.3);

    const std::vector<double> grid{0.05, 0.1, 0.2, 0.4};
    const cggm::CvChoice a =
        cross_validate(x, m.partition, GraphKind::Average, 5, grid, opt);
    const cggm::CvChoice b =
        cross_validate(x, m.partition, GraphKind::Average, 5, grid, opt);
    CHECK(a.lambda == b.lambda);
    CHECK(a.lambda_prime == a.lambda);
    CHECK(std::find(grid.begin(), grid.end(), a.lambda) != grid.end());

    CHECK_THROWS_AS(
        cross_validate(x, m.partition, GraphKind::Average, 5, {}, opt),
        cggm::EmptyGridError);
    CHECK_THROWS_AS(
        cross_validate(x, m.partition, GraphKind::Average, 1, grid, opt),
        cggm::DimensionError);
}

TEST_CASE("cross-validation rejects over-regularized grid points") {
    const MatrixXd theta =
        cggm::precision_from_adjacency(cggm::gen_band(4, 3), 0.3);
    cggm::Philox4x32 g(8, 2);
    VectorXd gamma(12);
    for (int i = 0; i < 12; ++i) gamma(i) = g.next_uniform(0.25, 0.5);
    const cggm::LatentModel m =
        cggm::build_model(Partition::round_robin(12, 4), theta, gamma);
    const int n = 3000;
    const cggm::SampleMatrix x = cggm::sample(m, n, 23, 3);

    // at this sample size the held-out risk punishes shrinkage well above
    // the sqrt(log K / n) scale, so the pick lands at or below the default
    const double base = cggm::default_lambda(4, n);
    const std::vector<double> grid{0.25 * base, 0.5 * base, base, 2.0 * base,
                                   4.0 * base};
    CvOptions opt;
    opt.seed = 9;
    const cggm::CvChoice choice =
        cross_validate(x, m.partition, GraphKind::Average, 5, grid, opt);
    CHECK(choice.lambda <= base);
}

TEST_CASE("cross-validation variants") {
    const MatrixXd theta =
        cggm::precision_from_adjacency(cggm::gen_band(3, 1), 0.3);
    cggm::Philox4x32 g(5, 2);
    VectorXd gamma(9);
    for (int i = 0; i < 9; ++i) gamma(i) = g.next_uniform(0.25, 0.5);
    const cggm::LatentModel m =
        cggm::build_model(Partition::round_robin(9, 3), theta, gamma);
    const cggm::SampleMatrix x = cggm::sample(m, 150, 29, 3);

    const std::vector<double> grid{0.1, 0.2, 0.4};

    CvOptions per_col;
    per_col.per_column = true;
    per_col.seed = 2;
    const cggm::CvChoice pc =
        cross_validate(x, m.partition, GraphKind::Latent, 4, grid, per_col);
    REQUIRE(pc.per_column.size() == 3);
    for (int k = 0; k < 3; ++k)
        CHECK(std::find(grid.begin(), grid.end(), pc.per_column(k)) != grid.end());
    CHECK(pc.lambda == doctest::Approx(pc.per_column.mean()));

    CvOptions two_dim;
    two_dim.two_dimensional = true;
    two_dim.seed = 2;
    const cggm::CvChoice td =
        cross_validate(x, m.partition, GraphKind::Average, 4, grid, two_dim);
    CHECK(std::find(grid.begin(), grid.end(), td.lambda) != grid.end());
    CHECK(std::find(grid.begin(), grid.end(), td.lambda_prime) != grid.end());
}

TEST_CASE("csv ingestion") {
    const TempFile plain("plain.csv", "1,2\n3,4\n5,6\n");
    const MatrixXd x = ingest_csv(plain.path);
    REQUIRE(x.rows() == 3);
    REQUIRE(x.cols() == 2);
    CHECK(x.colwise().mean().cwiseAbs().maxCoeff() == 0.0);
    CHECK(x(0, 0) == -2.0);
    CHECK(x(2, 1) == 2.0);

    const TempFile headed("headed.csv", "alpha,beta\n1,2\n3,4\n");
    const MatrixXd y = ingest_csv(headed.path);
    CHECK(y.rows() == 2);
    CHECK(y.cols() == 2);

    const TempFile blank("blank.csv", "1,2\n\n3,4\n");
    try {
        ingest_csv(blank.path);
        FAIL("expected ParseError");
    } catch (const cggm::ParseError& err) {
        CHECK(std::string(err.what()).find("line 2") != std::string::npos);
    }

    const TempFile ragged("ragged.csv", "1,2\n3\n");
    CHECK_THROWS_AS(ingest_csv(ragged.path), cggm::NonRectangularError);

    const TempFile midword("midword.csv", "1,2\n3,x\n");
    try {
        ingest_csv(midword.path);
        FAIL("expected ParseError");
    } catch (const cggm::ParseError& err) {
        const std::string what = err.what();
        CHECK(what.find("line 2") != std::string::npos);
        CHECK(what.find("column 2") != std::string::npos);
    }

    const TempFile headers_only("headers_only.csv", "a,b\n");
    CHECK_THROWS_AS(ingest_csv(headers_only.path), cggm::ParseError);

    CHECK_THROWS_AS(ingest_csv("/nonexistent/file.csv"), cggm::IoError);
}

TEST_CASE("graph export") {
    cggm::FdrReport report;
    report.alpha = 0.1;
    report.method = Method::BY;
    for (int e = 0; e < 2; ++e) {
        cggm::EdgeInference edge;
        edge.t = e;
        edge.k = e + 1;
        edge.estimate = 0.5 + e;
        edge.stat = 3.0 + e;
        report.selected.push_back(edge);
    }
    report.n_rejections = 2;
    const Partition p = Partition::round_robin(9, 3);

    const TempFile edges("edges.csv");
    cggm::export_graph(report, p, edges.path, cggm::ExportFormat::EdgeList);
    std::ifstream in(edges.path);
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line == "t,k,estimate,stat");
    int rows = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        int t, k;
        double est, stat;
        REQUIRE(std::sscanf(line.c_str(), "%d,%d,%lf,%lf", &t, &k, &est, &stat) ==
                4);
        CHECK(t == rows);
        CHECK(est == doctest::Approx(0.5 + rows));
        ++rows;
    }
    CHECK(rows == 2);

    const TempFile dot("graph.dot");
    cggm::export_graph(report, p, dot.path, cggm::ExportFormat::Dot);
    std::ifstream din(dot.path);
    std::string text((std::istreambuf_iterator<char>(din)),
                     std::istreambuf_iterator<char>());
    CHECK(dot_well_formed(text));
    CHECK(text.find("c0 -- c1;") != std::string::npos);
    CHECK(text.find("c1 -- c2;") != std::string::npos);

    // empty selection: header only, still well formed
    cggm::FdrReport empty;
    const TempFile empty_edges("empty_edges.csv");
    cggm::export_graph(empty, p, empty_edges.path, cggm::ExportFormat::EdgeList);
    std::ifstream ein(empty_edges.path);
    int count = 0;
    while (std::getline(ein, line))
        if (!line.empty()) ++count;
    CHECK(count == 1);

    const TempFile empty_dot("empty.dot");
    cggm::export_graph(empty, p, empty_dot.path, cggm::ExportFormat::Dot);
    std::ifstream edin(empty_dot.path);
    std::string etext((std::istreambuf_iterator<char>(edin)),
                      std::istreambuf_iterator<char>());
    CHECK(dot_well_formed(etext));
}

TEST_CASE("aggregate csv and summary document") {
    const ExperimentConfig cfg = tiny_config();
    const ExperimentResult res = run_experiment(cfg);

    const TempFile csv("aggregate.csv");
    cggm::write_aggregate_csv(res, csv.path);
    std::ifstream in(csv.path);
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line == "graph_kind,method,alpha,topology,K,m,mean_fdr,mean_power,n_fail");
    int rows = 0;
    while (std::getline(in, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 4);

    const nlohmann::json doc = nlohmann::json::parse(cggm::summary_json(res));
    CHECK(doc["version"] == cggm::kLibraryVersion);
    CHECK(doc["n_replications"] == 2);
    CHECK(doc["n_failed"] == 0);
    CHECK(doc["config"]["d"] == 12);
    CHECK(doc["config"]["topology"] == "band3");
    CHECK(doc["aggregate"].size() == 4);
    CHECK(doc["records"].size() == 2);
    for (const auto& rec : doc["records"]) {
        CHECK(rec.contains("seed"));
        CHECK(rec.contains("latent_edge_count"));
        CHECK(rec["failed"] == false);
    }
}
