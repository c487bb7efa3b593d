#include "cggm/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "cggm/clustering.hpp"
#include "cggm/covariance.hpp"
#include "cggm/errors.hpp"
#include "cggm/graphs.hpp"
#include "cggm/rng.hpp"

namespace cggm {
namespace {

// Philox stream ids inside one replication. Graph generation consumes the
// default stream 0 (inside gen_scale_free); keeping the others distinct makes
// every stage independently reproducible.
constexpr std::uint64_t kGammaStream = 2;
constexpr std::uint64_t kDataStream = 3;
constexpr std::uint64_t kCvStream = 4;

double now_sec() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

AdjacencyMatrix make_adjacency(const ExperimentConfig& cfg, std::uint64_t seed) {
    switch (cfg.topology) {
        case Topology::ScaleFree:
            return gen_scale_free(cfg.K, seed);
        case Topology::Hub:
            return gen_hub(cfg.K, cfg.hub_group_size);
        case Topology::Band3:
            return gen_band(cfg.K, 3);
    }
    throw ConfigError("make_adjacency: unknown topology");
}

std::vector<double> effective_grid(const ExperimentConfig& cfg, int K) {
    if (!cfg.cv_grid.empty()) return cfg.cv_grid;
    const double base = default_lambda(K, cfg.n);
    return {0.25 * base, 0.5 * base, base, 2.0 * base, 4.0 * base};
}

// Rewrites the selected edges of `report` from estimated-cluster ids into
// reference ids so they can be compared with ground truth. Estimation itself
// never needs this; only scoring does.
FdrReport translate_report(const FdrReport& report,
                           const std::vector<int>& label_map) {
    FdrReport out = report;
    for (EdgeInference& e : out.selected) {
        const int a = label_map[size_t(e.t)];
        const int b = label_map[size_t(e.k)];
        e.t = std::min(a, b);
        e.k = std::max(a, b);
    }
    return out;
}

ReplicationRecord run_one(const ExperimentConfig& cfg, int index) {
    ReplicationRecord rec;
    rec.index = index;
    rec.seed = cfg.base_seed + std::uint64_t(index);
    const double started = now_sec();
    try {
        const AdjacencyMatrix adj = make_adjacency(cfg, rec.seed);
        const Eigen::MatrixXd theta = precision_from_adjacency(adj, cfg.signal_c);
        const Partition g_star = Partition::round_robin(cfg.d, cfg.K);

        Philox4x32 gamma_rng(rec.seed, kGammaStream);
        Eigen::VectorXd gamma(cfg.d);
        for (int i = 0; i < cfg.d; ++i) gamma(i) = gamma_rng.next_uniform(0.25, 0.5);

        const LatentModel model = build_model(g_star, theta, gamma);
        const GroundTruthEdges truth = ground_truth(model);
        rec.latent_edge_count = int(truth.latent.size());

        const SampleMatrix x = sample(model, cfg.n, rec.seed, kDataStream);

        Partition g_hat = g_star;
        if (!cfg.use_true_partition) {
            const Eigen::MatrixXd sigma = sample_covariance(x);
            const CodMetric v = cod_metric(sigma);
            const double threshold = std::isnan(cfg.cod_threshold)
                                         ? default_cod_threshold(sigma, cfg.n)
                                         : cfg.cod_threshold;
            g_hat = cod_cluster(v, threshold);
        }
        const AlignResult align = align_partition(g_hat, g_star);
        rec.exact_cluster_recovery = align.exact_match;
        rec.estimated_k = g_hat.K;

        for (GraphKind kind : cfg.kinds) {
            Eigen::VectorXd lambda_cols, lambda_projs;
            if (cfg.tuning == TuningMode::CrossValidation) {
                CvOptions opts;
                opts.per_column = cfg.cv_per_column;
                opts.two_dimensional = cfg.cv_two_dim;
                opts.seed = rec.seed;
                const CvChoice choice = cross_validate(
                    x, g_hat, kind, cfg.cv_folds, effective_grid(cfg, g_hat.K), opts);
                lambda_cols = choice.per_column.size() > 0
                                  ? choice.per_column
                                  : Eigen::VectorXd::Constant(g_hat.K, choice.lambda);
                lambda_projs = cfg.cv_two_dim
                                   ? Eigen::VectorXd::Constant(g_hat.K,
                                                               choice.lambda_prime)
                                   : lambda_cols;
            } else {
                const double lambda = std::isnan(cfg.lambda)
                                          ? default_lambda(g_hat.K, cfg.n)
                                          : cfg.lambda;
                const double lambda_prime =
                    std::isnan(cfg.lambda_prime) ? lambda : cfg.lambda_prime;
                lambda_cols = Eigen::VectorXd::Constant(g_hat.K, lambda);
                lambda_projs = Eigen::VectorXd::Constant(g_hat.K, lambda_prime);
            }

            const std::vector<EdgeInference> edges =
                infer_graph(x, g_hat, kind, lambda_cols, lambda_projs);

            for (Method method : cfg.methods) {
                for (double alpha : cfg.alphas) {
                    const double cell_start = now_sec();
                    const FdrReport report = method == Method::BY
                                                 ? by_cutoff(edges, alpha)
                                                 : bh_cutoff(edges, alpha);
                    const Scores s =
                        score(translate_report(report, align.label_map), truth, kind);
                    CellResult cell;
                    cell.kind = kind;
                    cell.method = method;
                    cell.alpha = alpha;
                    cell.fdr = s.fdr;
                    cell.power = s.power;
                    cell.runtime_sec = now_sec() - cell_start;
                    rec.cells.push_back(cell);
                }
            }
        }
    } catch (const std::exception& ex) {
        rec.failed = true;
        rec.failure = ex.what();
        rec.cells.clear();
    }
    rec.runtime_sec = now_sec() - started;
    return rec;
}

}  // namespace

const char* topology_name(Topology topology) {
    switch (topology) {
        case Topology::ScaleFree:
            return "scalefree";
        case Topology::Hub:
            return "hub";
        case Topology::Band3:
            return "band3";
    }
    return "unknown";
}

void validate_config(const ExperimentConfig& cfg) {
    if (cfg.replications < 1) throw ConfigError("replications must be >= 1");
    if (cfg.K < 2) throw ConfigError("K must be >= 2");
    if (cfg.d < cfg.K) throw ConfigError("d must be >= K");
    if (cfg.n < 2) throw ConfigError("n must be >= 2");
    if (cfg.signal_c <= 0.0) throw ConfigError("signal c must be positive");
    if (cfg.alphas.empty()) throw ConfigError("need at least one alpha");
    for (double a : cfg.alphas) {
        if (!(a > 0.0 && a < 1.0)) throw ConfigError("alpha must be in (0,1)");
    }
    if (cfg.methods.empty()) throw ConfigError("need at least one method");
    if (cfg.kinds.empty()) throw ConfigError("need at least one graph kind");
    if (cfg.topology == Topology::Hub && cfg.K % cfg.hub_group_size != 0) {
        throw ConfigError("hub topology needs K divisible by the group size");
    }
    if (cfg.tuning == TuningMode::CrossValidation && cfg.cv_folds < 2) {
        throw ConfigError("cross-validation needs >= 2 folds");
    }
    if (!cfg.use_true_partition && cfg.d < 4) {
        throw ConfigError("clustering needs d >= 4");
    }
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    validate_config(cfg);

    ExperimentResult result;
    result.config = cfg;
    result.records.resize(size_t(cfg.replications));

    const int hw = int(std::thread::hardware_concurrency());
    const int n_threads =
        std::max(1, std::min(cfg.threads > 0 ? cfg.threads : std::max(hw, 1),
                             cfg.replications));
    std::atomic<int> next{0};
    const auto worker = [&]() {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= cfg.replications) break;
            result.records[size_t(i)] = run_one(cfg, i);
        }
    };
    std::vector<std::thread> pool;
    for (int t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
    for (std::thread& t : pool) t.join();

    int n_fail = 0;
    for (const ReplicationRecord& rec : result.records) {
        if (rec.failed) ++n_fail;
    }
    // Cells are laid out identically in every successful record (kind, then
    // method, then alpha), so the aggregate is a plain column mean.
    size_t cell_index = 0;
    for (GraphKind kind : cfg.kinds) {
        for (Method method : cfg.methods) {
            for (double alpha : cfg.alphas) {
                AggregateRow row;
                row.kind = kind;
                row.method = method;
                row.alpha = alpha;
                row.topology = cfg.topology;
                row.K = cfg.K;
                row.m = cfg.d / cfg.K;
                row.n_fail = n_fail;
                double fdr = 0.0, power = 0.0;
                int count = 0;
                for (const ReplicationRecord& rec : result.records) {
                    if (rec.failed) continue;
                    const CellResult& cell = rec.cells.at(cell_index);
                    fdr += cell.fdr;
                    power += cell.power;
                    ++count;
                }
                row.mean_fdr = count > 0 ? fdr / count : 0.0;
                row.mean_power = count > 0 ? power / count : 0.0;
                result.table.push_back(row);
                ++cell_index;
            }
        }
    }
    return result;
}

CvChoice cross_validate(const SampleMatrix& x, const Partition& g_hat,
                        GraphKind kind, int folds, const std::vector<double>& grid,
                        const CvOptions& options) {
    if (grid.empty()) {
        throw EmptyGridError("cross_validate: tuning grid is empty");
    }
    if (folds < 2) {
        throw DimensionError("cross_validate: need at least 2 folds");
    }
    const int n = int(x.rows());
    if (n < folds) {
        throw DimensionError("cross_validate: need n >= folds");
    }
    const int K = g_hat.K;
    const int n_grid = int(grid.size());
    const double inf = std::numeric_limits<double>::infinity();

    // Seeded shuffle, then strided assignment: fold f owns positions f,
    // f+folds, ... of the shuffled order.
    std::vector<int> order(static_cast<size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    Philox4x32 rng(options.seed, kCvStream);
    for (int i = n - 1; i > 0; --i) {
        const int j = int(rng.next_u64() % std::uint64_t(i + 1));
        std::swap(order[size_t(i)], order[size_t(j)]);
    }

    Eigen::MatrixXd column_risk = Eigen::MatrixXd::Zero(n_grid, K);
    Eigen::VectorXd projection_risk = Eigen::VectorXd::Zero(n_grid);

    for (int f = 0; f < folds; ++f) {
        std::vector<int> train_rows, val_rows;
        for (int pos = 0; pos < n; ++pos) {
            (pos % folds == f ? val_rows : train_rows).push_back(order[size_t(pos)]);
        }
        SampleMatrix x_train(train_rows.size(), x.cols());
        for (size_t r = 0; r < train_rows.size(); ++r) {
            x_train.row(Eigen::Index(r)) = x.row(train_rows[r]);
        }
        SampleMatrix x_val(val_rows.size(), x.cols());
        for (size_t r = 0; r < val_rows.size(); ++r) {
            x_val.row(Eigen::Index(r)) = x.row(val_rows[r]);
        }
        const Eigen::MatrixXd m_train = plug_in_matrix(x_train, g_hat, kind);
        const Eigen::MatrixXd m_val = plug_in_matrix(x_val, g_hat, kind);

        for (int gi = 0; gi < n_grid; ++gi) {
            for (int k = 0; k < K; ++k) {
                try {
                    const Eigen::VectorXd beta =
                        clime_column(m_train, k, grid[size_t(gi)]).beta;
                    column_risk(gi, k) +=
                        0.5 * beta.dot(m_val * beta) - beta(k);
                } catch (const Error&) {
                    column_risk(gi, k) = inf;
                }
            }
            if (options.two_dimensional) {
                for (int t = 0; t < K; ++t) {
                    try {
                        const NuisanceProjection proj =
                            nuisance_projection(m_train, t, grid[size_t(gi)]);
                        Eigen::VectorXd sub_target(K - 1);
                        Eigen::MatrixXd sub(K - 1, K - 1);
                        for (int i = 0, ii = 0; i < K; ++i) {
                            if (i == t) continue;
                            sub_target(ii) = m_val(i, t);
                            for (int j = 0, jj = 0; j < K; ++j) {
                                if (j == t) continue;
                                sub(ii, jj) = m_val(i, j);
                                ++jj;
                            }
                            ++ii;
                        }
                        projection_risk(gi) +=
                            0.5 * proj.w.dot(sub * proj.w) - proj.w.dot(sub_target);
                    } catch (const Error&) {
                        projection_risk(gi) = inf;
                    }
                }
            }
        }
    }

    const auto argmin = [&](const Eigen::VectorXd& risk) {
        int best = 0;
        for (int gi = 1; gi < n_grid; ++gi) {
            if (risk(gi) < risk(best)) best = gi;
        }
        return best;
    };

    CvChoice choice;
    if (options.per_column) {
        choice.per_column.resize(K);
        double total = 0.0;
        for (int k = 0; k < K; ++k) {
            const int best = argmin(column_risk.col(k));
            choice.per_column(k) = grid[size_t(best)];
            total += choice.per_column(k);
        }
        choice.lambda = total / K;
    } else {
        choice.lambda = grid[size_t(argmin(column_risk.rowwise().sum()))];
    }
    choice.lambda_prime = options.two_dimensional
                              ? grid[size_t(argmin(projection_risk))]
                              : choice.lambda;
    return choice;
}

namespace {

bool parse_double_token(const std::string& token, double& out) {
    const char* begin = token.c_str();
    char* end = nullptr;
    out = std::strtod(begin, &end);
    return end != begin && end == begin + token.size() && std::isfinite(out);
}

std::string trim(const std::string& s) {
    size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace

SampleMatrix ingest_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("ingest_csv: cannot open '" + path + "'");
    }
    std::vector<std::vector<double>> rows;
    std::string line;
    int line_no = 0;
    int expected_fields = -1;
    bool saw_any_line = false;
    while (std::getline(in, line)) {
        ++line_no;
        saw_any_line = true;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) {
            throw ParseError("ingest_csv: line " + std::to_string(line_no) +
                             " is blank");
        }
        const std::vector<std::string> fields = split(line, ',');
        if (expected_fields == -1) {
            expected_fields = int(fields.size());
        } else if (int(fields.size()) != expected_fields) {
            throw NonRectangularError(
                "ingest_csv: line " + std::to_string(line_no) + " has " +
                std::to_string(fields.size()) + " fields, expected " +
                std::to_string(expected_fields));
        }
        std::vector<double> row(fields.size());
        bool numeric = true;
        size_t bad_col = 0;
        for (size_t c = 0; c < fields.size(); ++c) {
            if (!parse_double_token(trim(fields[c]), row[c])) {
                numeric = false;
                bad_col = c;
                break;
            }
        }
        if (!numeric) {
            if (line_no == 1) continue;  // header row
            throw ParseError("ingest_csv: line " + std::to_string(line_no) +
                             ", column " + std::to_string(bad_col + 1) +
                             ": cannot parse '" + trim(fields[bad_col]) + "'");
        }
        rows.push_back(std::move(row));
    }
    if (!saw_any_line || rows.empty()) {
        throw ParseError("ingest_csv: no data rows in '" + path + "'");
    }
    const int n = int(rows.size());
    const int d = expected_fields;
    SampleMatrix x(n, d);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < d; ++j) x(i, j) = rows[size_t(i)][size_t(j)];
    }
    x.rowwise() -= x.colwise().mean();  // the model is mean zero
    return x;
}

void export_graph(const FdrReport& report, const Partition& g_hat,
                  const std::string& path, ExportFormat format) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("export_graph: cannot open '" + path + "' for writing");
    }
    out << std::setprecision(17);
    if (format == ExportFormat::EdgeList) {
        out << "t,k,estimate,stat\n";
        for (const EdgeInference& e : report.selected) {
            out << e.t << ',' << e.k << ',' << e.estimate << ',' << e.stat << '\n';
        }
    } else {
        out << "graph selected_edges {\n";
        for (int k = 0; k < g_hat.K; ++k) {
            out << "  c" << k << " [label=\"cluster " << k << " ("
                << g_hat.groups[size_t(k)].size() << " vars)\"];\n";
        }
        for (const EdgeInference& e : report.selected) {
            out << "  c" << e.t << " -- c" << e.k << ";\n";
        }
        out << "}\n";
    }
    out.flush();
    if (!out.good()) {
        throw IoError("export_graph: write to '" + path + "' failed");
    }
}

namespace {

bool parse_bool_value(const std::string& value, const std::string& key) {
    if (value == "1" || value == "true" || value == "yes") return true;
    if (value == "0" || value == "false" || value == "no") return false;
    throw ConfigError("config key '" + key + "': expected a boolean, got '" +
                      value + "'");
}

double parse_double_value(const std::string& value, const std::string& key) {
    if (value == "auto") return std::numeric_limits<double>::quiet_NaN();
    double out;
    if (!parse_double_token(value, out)) {
        throw ConfigError("config key '" + key + "': expected a number, got '" +
                          value + "'");
    }
    return out;
}

int parse_int_value(const std::string& value, const std::string& key) {
    const double out = parse_double_value(value, key);
    const int as_int = int(out);
    if (double(as_int) != out) {
        throw ConfigError("config key '" + key + "': expected an integer, got '" +
                          value + "'");
    }
    return as_int;
}

std::vector<double> parse_double_list(const std::string& value,
                                      const std::string& key) {
    std::vector<double> out;
    for (const std::string& tok : split(value, ',')) {
        out.push_back(parse_double_value(trim(tok), key));
    }
    return out;
}

}  // namespace

void apply_config_entry(ExperimentConfig& cfg, const std::string& key,
                        const std::string& value) {
    if (key == "d") {
        cfg.d = parse_int_value(value, key);
    } else if (key == "n") {
        cfg.n = parse_int_value(value, key);
    } else if (key == "k") {
        cfg.K = parse_int_value(value, key);
    } else if (key == "topology") {
        if (value == "scalefree") {
            cfg.topology = Topology::ScaleFree;
        } else if (value == "hub") {
            cfg.topology = Topology::Hub;
        } else if (value == "band3") {
            cfg.topology = Topology::Band3;
        } else {
            throw ConfigError("config key 'topology': unknown value '" + value +
                              "'");
        }
    } else if (key == "c") {
        cfg.signal_c = parse_double_value(value, key);
    } else if (key == "hub_group_size") {
        cfg.hub_group_size = parse_int_value(value, key);
    } else if (key == "alpha") {
        cfg.alphas = parse_double_list(value, key);
    } else if (key == "method") {
        if (value == "by") {
            cfg.methods = {Method::BY};
        } else if (value == "bh") {
            cfg.methods = {Method::BH};
        } else if (value == "both") {
            cfg.methods = {Method::BY, Method::BH};
        } else {
            throw ConfigError("config key 'method': expected by|bh|both, got '" +
                              value + "'");
        }
    } else if (key == "graph") {
        if (value == "latent") {
            cfg.kinds = {GraphKind::Latent};
        } else if (value == "average") {
            cfg.kinds = {GraphKind::Average};
        } else if (value == "both") {
            cfg.kinds = {GraphKind::Average, GraphKind::Latent};
        } else {
            throw ConfigError(
                "config key 'graph': expected latent|average|both, got '" + value +
                "'");
        }
    } else if (key == "replications") {
        cfg.replications = parse_int_value(value, key);
    } else if (key == "seed") {
        cfg.base_seed = std::uint64_t(parse_double_value(value, key));
    } else if (key == "true_partition") {
        cfg.use_true_partition = parse_bool_value(value, key);
    } else if (key == "cod_threshold") {
        cfg.cod_threshold = parse_double_value(value, key);
    } else if (key == "tuning") {
        if (value == "fixed") {
            cfg.tuning = TuningMode::Fixed;
        } else if (value == "cv") {
            cfg.tuning = TuningMode::CrossValidation;
        } else {
            throw ConfigError("config key 'tuning': expected fixed|cv, got '" +
                              value + "'");
        }
    } else if (key == "lambda") {
        cfg.lambda = parse_double_value(value, key);
    } else if (key == "lambda_prime") {
        cfg.lambda_prime = parse_double_value(value, key);
    } else if (key == "folds") {
        cfg.cv_folds = parse_int_value(value, key);
    } else if (key == "grid") {
        cfg.cv_grid = parse_double_list(value, key);
    } else if (key == "cv_per_column") {
        cfg.cv_per_column = parse_bool_value(value, key);
    } else if (key == "cv_two_dim") {
        cfg.cv_two_dim = parse_bool_value(value, key);
    } else if (key == "threads") {
        cfg.threads = parse_int_value(value, key);
    } else {
        throw ConfigError("unknown config key '" + key + "'");
    }
}

ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const size_t eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": expected key=value");
        }
        apply_config_entry(cfg, trim(stripped.substr(0, eq)),
                          trim(stripped.substr(eq + 1)));
    }
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file '" + path + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str());
}

void write_aggregate_csv(const ExperimentResult& result, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("write_aggregate_csv: cannot open '" + path + "'");
    }
    out << "graph_kind,method,alpha,topology,K,m,mean_fdr,mean_power,n_fail\n";
    out << std::setprecision(10);
    for (const AggregateRow& row : result.table) {
        out << graph_kind_name(row.kind) << ',' << method_name(row.method) << ','
            << row.alpha << ',' << topology_name(row.topology) << ',' << row.K
            << ',' << row.m << ',' << row.mean_fdr << ',' << row.mean_power << ','
            << row.n_fail << '\n';
    }
    out.flush();
    if (!out.good()) {
        throw IoError("write_aggregate_csv: write to '" + path + "' failed");
    }
}

std::string summary_json(const ExperimentResult& result) {
    nlohmann::json config;
    const ExperimentConfig& cfg = result.config;
    config["d"] = cfg.d;
    config["n"] = cfg.n;
    config["k"] = cfg.K;
    config["topology"] = topology_name(cfg.topology);
    config["c"] = cfg.signal_c;
    config["hub_group_size"] = cfg.hub_group_size;
    config["alpha"] = cfg.alphas;
    {
        std::vector<std::string> methods;
        for (Method m : cfg.methods) methods.emplace_back(method_name(m));
        config["method"] = methods;
        std::vector<std::string> kinds;
        for (GraphKind g : cfg.kinds) kinds.emplace_back(graph_kind_name(g));
        config["graph"] = kinds;
    }
    config["replications"] = cfg.replications;
    config["seed"] = cfg.base_seed;
    config["true_partition"] = cfg.use_true_partition;
    if (!std::isnan(cfg.cod_threshold)) config["cod_threshold"] = cfg.cod_threshold;
    config["tuning"] =
        cfg.tuning == TuningMode::Fixed ? "fixed" : "cv";
    if (!std::isnan(cfg.lambda)) config["lambda"] = cfg.lambda;
    if (!std::isnan(cfg.lambda_prime)) config["lambda_prime"] = cfg.lambda_prime;
    config["folds"] = cfg.cv_folds;
    if (!cfg.cv_grid.empty()) config["grid"] = cfg.cv_grid;
    config["cv_per_column"] = cfg.cv_per_column;
    config["cv_two_dim"] = cfg.cv_two_dim;

    nlohmann::json aggregate = nlohmann::json::array();
    for (const AggregateRow& row : result.table) {
        aggregate.push_back({{"graph_kind", graph_kind_name(row.kind)},
                             {"method", method_name(row.method)},
                             {"alpha", row.alpha},
                             {"topology", topology_name(row.topology)},
                             {"K", row.K},
                             {"m", row.m},
                             {"mean_fdr", row.mean_fdr},
                             {"mean_power", row.mean_power},
                             {"n_fail", row.n_fail}});
    }

    nlohmann::json records = nlohmann::json::array();
    int n_failed = 0;
    for (const ReplicationRecord& rec : result.records) {
        if (rec.failed) ++n_failed;
        nlohmann::json r = {{"index", rec.index},
                            {"seed", rec.seed},
                            {"exact_cluster_recovery", rec.exact_cluster_recovery},
                            {"estimated_k", rec.estimated_k},
                            {"latent_edge_count", rec.latent_edge_count},
                            {"runtime_sec", rec.runtime_sec},
                            {"failed", rec.failed}};
        if (rec.failed) r["failure"] = rec.failure;
        records.push_back(r);
    }

    nlohmann::json doc = {{"version", kLibraryVersion},
                          {"config", config},
                          {"aggregate", aggregate},
                          {"n_replications", int(result.records.size())},
                          {"n_failed", n_failed},
                          {"records", records}};
    return doc.dump(2);
}

}  // namespace cggm
