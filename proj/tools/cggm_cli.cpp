#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cggm/clustering.hpp"
#include "cggm/errors.hpp"
#include "cggm/experiment.hpp"
#include "cggm/fdr.hpp"
#include "cggm/precision.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;

std::string fmt(double v) {
    std::ostringstream out;
    out << std::setprecision(10) << v;
    return out.str();
}

void ensure_out_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw cggm::IoError("cannot create output directory '" + dir +
                            "': " + ec.message());
    }
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) {
        throw cggm::IoError("cannot open '" + path + "' for writing");
    }
    out << text;
    out.flush();
    if (!out.good()) {
        throw cggm::IoError("write to '" + path + "' failed");
    }
}

struct SimulateArgs {
    std::string config_path;
    std::string out_dir = ".";
    int d = 0, n = 0, K = 0;
    std::string topology, method, graph, tuning;
    double c = 0.0, cod_threshold = 0.0, lambda = 0.0, lambda_prime = 0.0;
    int hub_group_size = 0, replications = 0, folds = 0, threads = 0;
    std::uint64_t seed = 0;
    bool true_partition = false, cv_per_column = false, cv_two_dim = false;
    std::vector<double> alphas, grid;
};

void add_simulate_options(CLI::App& cmd, SimulateArgs& a) {
    cmd.add_option("--config", a.config_path, "flat key=value config file");
    cmd.add_option("--out", a.out_dir, "output directory (default .)");
    cmd.add_option("--d", a.d, "number of observed variables");
    cmd.add_option("--n", a.n, "sample size");
    cmd.add_option("--K", a.K, "number of clusters");
    cmd.add_option("--topology", a.topology, "scalefree|hub|band3");
    cmd.add_option("--c", a.c, "off-diagonal signal strength");
    cmd.add_option("--hub-group-size", a.hub_group_size, "hub group size (5 or 6)");
    cmd.add_option("--alpha", a.alphas, "target FDR levels");
    cmd.add_option("--method", a.method, "by|bh|both");
    cmd.add_option("--graph", a.graph, "latent|average|both");
    cmd.add_option("--replications", a.replications, "number of replications");
    cmd.add_option("--seed", a.seed, "base seed");
    cmd.add_flag("--true-partition", a.true_partition,
                 "skip clustering, use the generating partition");
    cmd.add_option("--cod-threshold", a.cod_threshold,
                   "clustering threshold override");
    cmd.add_option("--tuning", a.tuning, "fixed|cv");
    cmd.add_option("--lambda", a.lambda, "column tuning value");
    cmd.add_option("--lambda-prime", a.lambda_prime, "projection tuning value");
    cmd.add_option("--folds", a.folds, "cross-validation folds");
    cmd.add_option("--grid", a.grid, "cross-validation grid values");
    cmd.add_flag("--cv-per-column", a.cv_per_column,
                 "tune each precision column separately");
    cmd.add_flag("--cv-two-dim", a.cv_two_dim,
                 "tune lambda_prime on the projection risk");
    cmd.add_option("--threads", a.threads, "worker threads (0 = auto)");
}

cggm::ExperimentConfig build_config(const CLI::App& cmd, const SimulateArgs& a) {
    cggm::ExperimentConfig cfg;
    if (!a.config_path.empty()) {
        cfg = cggm::parse_config_file(a.config_path);
    }
    const auto set = [&](const char* flag, const std::string& key,
                         const std::string& value) {
        if (cmd.count(flag) > 0) cggm::apply_config_entry(cfg, key, value);
    };
    set("--d", "d", std::to_string(a.d));
    set("--n", "n", std::to_string(a.n));
    set("--K", "k", std::to_string(a.K));
    set("--topology", "topology", a.topology);
    set("--c", "c", fmt(a.c));
    set("--hub-group-size", "hub_group_size", std::to_string(a.hub_group_size));
    if (cmd.count("--alpha") > 0) {
        std::string joined;
        for (double v : a.alphas) {
            if (!joined.empty()) joined += ',';
            joined += fmt(v);
        }
        cggm::apply_config_entry(cfg, "alpha", joined);
    }
    set("--method", "method", a.method);
    set("--graph", "graph", a.graph);
    set("--replications", "replications", std::to_string(a.replications));
    set("--seed", "seed", std::to_string(a.seed));
    if (cmd.count("--true-partition") > 0) {
        cggm::apply_config_entry(cfg, "true_partition", "true");
    }
    set("--cod-threshold", "cod_threshold", fmt(a.cod_threshold));
    set("--tuning", "tuning", a.tuning);
    set("--lambda", "lambda", fmt(a.lambda));
    set("--lambda-prime", "lambda_prime", fmt(a.lambda_prime));
    set("--folds", "folds", std::to_string(a.folds));
    if (cmd.count("--grid") > 0) {
        std::string joined;
        for (double v : a.grid) {
            if (!joined.empty()) joined += ',';
            joined += fmt(v);
        }
        cggm::apply_config_entry(cfg, "grid", joined);
    }
    if (cmd.count("--cv-per-column") > 0) {
        cggm::apply_config_entry(cfg, "cv_per_column", "true");
    }
    if (cmd.count("--cv-two-dim") > 0) {
        cggm::apply_config_entry(cfg, "cv_two_dim", "true");
    }
    set("--threads", "threads", std::to_string(a.threads));
    return cfg;
}

int run_simulate(const CLI::App& cmd, const SimulateArgs& a) {
    const cggm::ExperimentConfig cfg = build_config(cmd, a);
    cggm::validate_config(cfg);
    ensure_out_dir(a.out_dir);

    const cggm::ExperimentResult result = cggm::run_experiment(cfg);

    const fs::path out(a.out_dir);
    cggm::write_aggregate_csv(result, (out / "aggregate.csv").string());
    write_text((out / "summary.json").string(), cggm::summary_json(result));

    std::cout << "graph_kind method alpha mean_fdr mean_power n_fail\n";
    for (const cggm::AggregateRow& row : result.table) {
        std::cout << cggm::graph_kind_name(row.kind) << ' '
                  << cggm::method_name(row.method) << ' ' << row.alpha << ' '
                  << fmt(row.mean_fdr) << ' ' << fmt(row.mean_power) << ' '
                  << row.n_fail << '\n';
    }
    int exact = 0, ok = 0;
    for (const cggm::ReplicationRecord& rec : result.records) {
        if (!rec.failed) ++ok;
        if (rec.exact_cluster_recovery) ++exact;
    }
    std::cout << ok << "/" << result.records.size()
              << " replications succeeded, " << exact
              << " with exact cluster recovery\n";
    std::cout << "wrote " << (out / "aggregate.csv").string() << " and "
              << (out / "summary.json").string() << "\n";
    return kExitOk;
}

struct DataArgs {
    std::string data_path;
    std::string out_dir = ".";
    double cod_threshold = 0.0;
    std::string graph = "both", method = "by", tuning = "fixed";
    double alpha = 0.1, lambda = 0.0, lambda_prime = 0.0;
    int folds = 5;
    std::vector<double> grid;
};

cggm::Partition cluster_data(const CLI::App& cmd, const DataArgs& a,
                             const cggm::SampleMatrix& x, double* threshold_out) {
    const Eigen::MatrixXd sigma = cggm::sample_covariance(x);
    const cggm::CodMetric v = cggm::cod_metric(sigma);
    const double threshold =
        cmd.count("--cod-threshold") > 0
            ? a.cod_threshold
            : cggm::default_cod_threshold(sigma, int(x.rows()));
    if (threshold_out != nullptr) *threshold_out = threshold;
    return cggm::cod_cluster(v, threshold);
}

int run_cluster(const CLI::App& cmd, const DataArgs& a) {
    const cggm::SampleMatrix x = cggm::ingest_csv(a.data_path);
    std::cout << "read n=" << x.rows() << " observations of d=" << x.cols()
              << " variables\n";
    double threshold = 0.0;
    const cggm::Partition g = cluster_data(cmd, a, x, &threshold);

    ensure_out_dir(a.out_dir);
    const fs::path out_path = fs::path(a.out_dir) / "partition.csv";
    std::ostringstream text;
    text << "variable,cluster\n";
    for (int i = 0; i < g.d(); ++i) {
        text << i << ',' << g.labels[size_t(i)] << '\n';
    }
    write_text(out_path.string(), text.str());

    std::cout << "threshold " << fmt(threshold) << ", " << g.K << " clusters, sizes";
    for (int s : g.group_sizes()) std::cout << ' ' << s;
    std::cout << "\nwrote " << out_path.string() << "\n";
    return kExitOk;
}

int run_infer(const CLI::App& cmd, const DataArgs& a) {
    const cggm::SampleMatrix x = cggm::ingest_csv(a.data_path);
    const int n = int(x.rows());
    std::cout << "read n=" << n << " observations of d=" << x.cols()
              << " variables\n";
    if (!(a.alpha > 0.0 && a.alpha < 1.0)) {
        throw cggm::ConfigError("--alpha must be in (0,1)");
    }
    std::vector<cggm::GraphKind> kinds;
    if (a.graph == "latent") {
        kinds = {cggm::GraphKind::Latent};
    } else if (a.graph == "average") {
        kinds = {cggm::GraphKind::Average};
    } else if (a.graph == "both") {
        kinds = {cggm::GraphKind::Average, cggm::GraphKind::Latent};
    } else {
        throw cggm::ConfigError("--graph must be latent|average|both");
    }
    if (a.method != "by" && a.method != "bh") {
        throw cggm::ConfigError("--method must be by|bh");
    }
    if (a.tuning != "fixed" && a.tuning != "cv") {
        throw cggm::ConfigError("--tuning must be fixed|cv");
    }

    double threshold = 0.0;
    const cggm::Partition g = cluster_data(cmd, a, x, &threshold);
    std::cout << "clustered into K=" << g.K << " clusters (threshold "
              << fmt(threshold) << ")\n";

    ensure_out_dir(a.out_dir);
    const fs::path out(a.out_dir);
    nlohmann::json summary = {
        {"version", cggm::kLibraryVersion},
        {"n", n},
        {"d", int(x.cols())},
        {"cod_threshold", threshold},
        {"k", g.K},
        {"cluster_sizes", g.group_sizes()},
        {"alpha", a.alpha},
        {"method", a.method},
    };
    nlohmann::json graphs = nlohmann::json::object();

    for (cggm::GraphKind kind : kinds) {
        double lambda, lambda_prime;
        if (a.tuning == "cv") {
            std::vector<double> grid = a.grid;
            if (grid.empty()) {
                const double base = cggm::default_lambda(g.K, n);
                grid = {0.25 * base, 0.5 * base, base, 2.0 * base, 4.0 * base};
            }
            const cggm::CvChoice choice =
                cggm::cross_validate(x, g, kind, a.folds, grid);
            lambda = choice.lambda;
            lambda_prime = choice.lambda_prime;
        } else {
            lambda = cmd.count("--lambda") > 0 ? a.lambda
                                               : cggm::default_lambda(g.K, n);
            lambda_prime =
                cmd.count("--lambda-prime") > 0 ? a.lambda_prime : lambda;
        }

        const std::vector<cggm::EdgeInference> edges =
            cggm::infer_graph(x, g, kind, lambda, lambda_prime);
        const cggm::FdrReport report = a.method == "by"
                                           ? cggm::by_cutoff(edges, a.alpha)
                                           : cggm::bh_cutoff(edges, a.alpha);

        const std::string name = cggm::graph_kind_name(kind);
        const fs::path edges_path = out / ("edges_" + name + ".csv");
        const fs::path dot_path = out / ("graph_" + name + ".dot");
        cggm::export_graph(report, g, edges_path.string(),
                           cggm::ExportFormat::EdgeList);
        cggm::export_graph(report, g, dot_path.string(), cggm::ExportFormat::Dot);

        graphs[name] = {{"lambda", lambda},
                        {"lambda_prime", lambda_prime},
                        {"cutoff", report.cutoff},
                        {"n_hypotheses", report.n_hypotheses},
                        {"n_rejections", report.n_rejections},
                        {"edges", edges_path.string()},
                        {"dot", dot_path.string()}};
        std::cout << name << " graph: " << report.n_rejections << "/"
                  << report.n_hypotheses << " edges selected at alpha " << a.alpha
                  << " (cutoff " << fmt(report.cutoff) << ")\n";
    }
    summary["graphs"] = graphs;
    write_text((out / "summary.json").string(), summary.dump(2));
    std::cout << "wrote " << (out / "summary.json").string() << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cluster-based Gaussian graphical models: clustering, de-biased "
                 "precision estimation, FDR-controlled edge selection"};
    app.require_subcommand(1);

    SimulateArgs sim_args;
    CLI::App* sim = app.add_subcommand(
        "simulate", "run a synthetic experiment and write aggregate results");
    add_simulate_options(*sim, sim_args);

    DataArgs infer_args;
    CLI::App* infer =
        app.add_subcommand("infer", "estimate graphs from a CSV data file");
    infer->add_option("--data", infer_args.data_path, "input CSV (rows = observations)")
        ->required();
    infer->add_option("--out", infer_args.out_dir, "output directory (default .)");
    infer->add_option("--graph", infer_args.graph, "latent|average|both");
    infer->add_option("--alpha", infer_args.alpha, "target FDR level");
    infer->add_option("--method", infer_args.method, "by|bh");
    infer->add_option("--cod-threshold", infer_args.cod_threshold,
                      "clustering threshold override");
    infer->add_option("--tuning", infer_args.tuning, "fixed|cv");
    infer->add_option("--lambda", infer_args.lambda, "column tuning value");
    infer->add_option("--lambda-prime", infer_args.lambda_prime,
                      "projection tuning value");
    infer->add_option("--folds", infer_args.folds, "cross-validation folds");
    infer->add_option("--grid", infer_args.grid, "cross-validation grid values");

    DataArgs cluster_args;
    CLI::App* cluster =
        app.add_subcommand("cluster", "estimate the variable partition from a CSV");
    cluster->add_option("--data", cluster_args.data_path,
                        "input CSV (rows = observations)")
        ->required();
    cluster->add_option("--out", cluster_args.out_dir,
                        "output directory (default .)");
    cluster->add_option("--cod-threshold", cluster_args.cod_threshold,
                        "clustering threshold override");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (sim->parsed()) return run_simulate(*sim, sim_args);
        if (infer->parsed()) return run_infer(*infer, infer_args);
        if (cluster->parsed()) return run_cluster(*cluster, cluster_args);
        std::cerr << "no subcommand given\n";
        return kExitConfig;
    } catch (const cggm::ConfigError& ex) {
        std::cerr << "config error: " << ex.what() << "\n";
        return kExitConfig;
    } catch (const cggm::ParseError& ex) {
        std::cerr << "data error: " << ex.what() << "\n";
        return kExitData;
    } catch (const cggm::IoError& ex) {
        std::cerr << "data error: " << ex.what() << "\n";
        return kExitData;
    } catch (const cggm::DomainError& ex) {
        std::cerr << "config error: " << ex.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kExitFailure;
    }
}
