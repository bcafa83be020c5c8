#pragma once

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "spmld/checkpoint.hpp"
#include "spmld/config.hpp"
#include "spmld/dataset.hpp"
#include "spmld/io.hpp"
#include "spmld/metrics.hpp"
#include "spmld/model.hpp"
#include "spmld/optim.hpp"
#include "spmld/partition.hpp"

namespace spmld {

inline MultiLabelDataset load_dataset(const std::string& path, const RunConfig& cfg) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open dataset file: " + path);
    if (cfg.format == "arff") return parse_arff_numeric(in, cfg.arff_labels);
    return parse_sparse_multilabel(in);
}

inline FitMode parse_mode(const std::string& mode) {
    if (mode == "spmld") return FitMode::spmld;
    if (mode == "glocal") return FitMode::glocal;
    throw ConfigError("mode must be 'spmld' or 'glocal'");
}

// Everything one training run produces, kept in memory; the CLI decides what
// lands on disk.
struct TrainArtifacts {
    MultiLabelDataset train;
    MultiLabelDataset test;
    NormalizerStats stats;
    GroupPartition partition;
    ModelState state;
    PaceState pace;
    FitTrace trace;
    HyperParams hp;
    Matrix train_mask;  // mask actually used (after rho sampling)
    double wall_seconds = 0.0;
};

// One full pipeline pass: mask -> split -> normalize -> partition ->
// initialize -> fit. All randomness flows from `seed` through fixed
// sub-streams, so a (config, seed) pair pins every artifact.
inline TrainArtifacts train_once(const MultiLabelDataset& full, const RunConfig& cfg,
                                 std::uint64_t seed, FitMode mode, double rho) {
    const auto t0 = std::chrono::steady_clock::now();

    MultiLabelDataset working = full;
    if (rho < 1.0) working = mask_labels(working, rho, derive_seed(seed, 1));

    TrainArtifacts art;
    if (cfg.test_path.empty()) {
        auto [train, test] = split(working, SplitSpec{cfg.split_fraction, derive_seed(seed, 2)});
        art.train = std::move(train);
        art.test = std::move(test);
    } else {
        art.train = std::move(working);
        art.test = load_dataset(cfg.test_path, cfg);
        if (art.test.dim() != art.train.dim() || art.test.num_labels() != art.train.num_labels())
            throw ShapeError("test dataset dimensions do not match the training data");
    }

    if (cfg.normalize) {
        auto [norm_train, stats] = normalize_features(art.train);
        art.train = std::move(norm_train);
        art.stats = std::move(stats);
        art.test = art.stats.apply(art.test);
    }

    if (cfg.partition_method == "file") {
        std::ifstream pin(cfg.partition_file);
        if (!pin) throw ConfigError("cannot open partition file: " + cfg.partition_file);
        art.partition = read_partition(pin, art.train.num_instances());
        if (art.partition.num_groups() != cfg.groups)
            throw ConfigError("partition file group count disagrees with partition.groups");
    } else {
        art.partition =
            kmeans(art.train.features, cfg.groups, derive_seed(seed, 3), cfg.kmeans_iters);
    }

    art.hp = cfg.hyperparams(art.train.num_labels());
    ModelState init = initialize(art.train, art.hp, derive_seed(seed, 4));

    PaceState pace0;
    if (mode == FitMode::glocal) {
        // Host model: all-ones weights, pace terms identically zero.
        pace0 = make_pace(art.hp.k, art.train.num_instances(), 0.0, 0.0, 1.0, 1.0);
        pace0.lambda = 0.0;
    } else {
        pace0 = make_pace(art.hp.k, art.train.num_instances(), cfg.lambda0, cfg.gamma0,
                          cfg.mu1, cfg.mu2);
    }

    FitResult fitres = fit(art.train, art.partition, art.hp, pace0, cfg.optim, init, mode);
    art.state = std::move(fitres.state);
    art.pace = std::move(fitres.pace);
    art.trace = std::move(fitres.trace);
    art.train_mask = art.train.mask;

    art.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return art;
}

inline MetricsReport evaluate_model(const ModelState& state, const MultiLabelDataset& test) {
    if (state.W.rows() != test.dim())
        throw ShapeError("evaluate: model and dataset disagree on feature dimension");
    if (state.U.rows() != test.num_labels())
        throw ShapeError("evaluate: model and dataset disagree on label count");
    Matrix scores = predict_scores(state, test.features);
    return evaluate_metrics(scores, test.labels, test.num_labels());
}

// ---------------------------------------------------------------------------
// Report CSV: `metric,mean,std,seed_0,...` with `#` metadata lines on top.

inline void write_report_csv(std::ostream& os, const MetricsReport& rep) {
    os << "# labels: " << rep.label_count << "\n";
    for (const auto& [what, count] : rep.skip_counts)
        os << "# skipped " << what << ": " << count << "\n";
    std::size_t runs = 0;
    for (const auto& [name, stat] : rep.values) runs = std::max(runs, stat.per_seed.size());
    os << "metric,mean,std";
    for (std::size_t i = 0; i < runs; ++i) os << ",seed_" << i;
    os << "\n";
    for (const std::string& name : metric_names()) {
        auto it = rep.values.find(name);
        if (it == rep.values.end()) continue;
        os << name << ',' << ioutil::format_double(it->second.mean) << ','
           << ioutil::format_double(it->second.stddev);
        for (double v : it->second.per_seed) os << ',' << ioutil::format_double(v);
        os << "\n";
    }
}

inline MetricsReport read_report_csv(std::istream& in) {
    MetricsReport rep;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        std::string_view view = ioutil::trim(line);
        if (view.empty()) continue;
        if (view.front() == '#') {
            if (ioutil::starts_with_nocase(view, "# labels:")) {
                std::size_t l = 0;
                if (ioutil::parse_size(ioutil::trim(view.substr(9)), l)) rep.label_count = l;
            }
            continue;
        }
        if (!header_seen) {
            header_seen = true;  // column header
            continue;
        }
        const auto parts = ioutil::split(view, ',');
        if (parts.size() < 3) throw ParseError("report: malformed row '" + line + "'");
        MetricStat stat;
        if (!ioutil::parse_double(parts[1], stat.mean) ||
            !ioutil::parse_double(parts[2], stat.stddev))
            throw ParseError("report: malformed numbers in '" + line + "'");
        for (std::size_t i = 3; i < parts.size(); ++i) {
            double v = 0.0;
            if (!ioutil::parse_double(parts[i], v))
                throw ParseError("report: malformed seed value in '" + line + "'");
            stat.per_seed.push_back(v);
        }
        rep.values[std::string(parts[0])] = std::move(stat);
    }
    if (rep.values.empty()) throw ParseError("report: no metric rows");
    return rep;
}

// ---------------------------------------------------------------------------
// Multi-seed experiment: per seed mask/split/train both modes, aggregate,
// and compare with paired t-tests. Minimized metrics are negated before the
// test so that `a_better` always means "method a wins".

struct ExperimentBlock {
    double rho = 1.0;
    MetricsReport spmld;
    MetricsReport glocal;
    std::vector<std::tuple<std::string, PairedTTest>> tests;  // per metric
};

struct ExperimentResult {
    std::vector<ExperimentBlock> blocks;
};

inline PairedTTest oriented_t_test(const std::string& metric, std::vector<double> a,
                                   std::vector<double> b, double alpha = 0.05) {
    if (metric_is_minimized(metric)) {
        for (double& v : a) v = -v;
        for (double& v : b) v = -v;
    }
    return paired_t_test(a, b, alpha);
}

inline ExperimentResult run_experiment(const MultiLabelDataset& full, const RunConfig& cfg) {
    if (cfg.seeds.size() < 2)
        throw ConfigError("experiment: need at least 2 seeds for the t-tests");
    ExperimentResult result;
    for (double rho : cfg.rho) {
        ExperimentBlock block;
        block.rho = rho;
        std::vector<MetricsReport> spmld_reports;
        std::vector<MetricsReport> glocal_reports;
        for (std::uint64_t seed : cfg.seeds) {
            try {
                TrainArtifacts a = train_once(full, cfg, seed, FitMode::spmld, rho);
                spmld_reports.push_back(evaluate_model(a.state, a.test));
                TrainArtifacts b = train_once(full, cfg, seed, FitMode::glocal, rho);
                glocal_reports.push_back(evaluate_model(b.state, b.test));
            } catch (const NumericalError& e) {
                throw NumericalError("seed " + std::to_string(seed) + ": " + e.what());
            } catch (const Error& e) {
                throw Error("seed " + std::to_string(seed) + ": " + e.what());
            }
        }
        block.spmld = aggregate(spmld_reports);
        block.glocal = aggregate(glocal_reports);
        for (const std::string& name : metric_names()) {
            block.tests.emplace_back(
                name, oriented_t_test(name, block.spmld.values.at(name).per_seed,
                                      block.glocal.values.at(name).per_seed));
        }
        result.blocks.push_back(std::move(block));
    }
    return result;
}

// Long-form table in the shape of the paper's result tables: one row per
// method, rho, metric with mean and std.
inline void write_experiment_table(std::ostream& os, const ExperimentResult& result) {
    os << "method,rho,metric,mean,std\n";
    char buf[256];
    for (const ExperimentBlock& block : result.blocks) {
        for (const auto& [label, rep] :
             {std::pair<const char*, const MetricsReport*>{"spmld", &block.spmld},
              std::pair<const char*, const MetricsReport*>{"glocal", &block.glocal}}) {
            for (const std::string& name : metric_names()) {
                const MetricStat& stat = rep->values.at(name);
                std::snprintf(buf, sizeof(buf), "%s,%.2f,%s,%.17g,%.17g\n", label, block.rho,
                              name.c_str(), stat.mean, stat.stddev);
                os << buf;
            }
        }
    }
}

inline void write_ttest_csv(std::ostream& os, const ExperimentBlock& block) {
    os << "method_a,method_b,metric,t,p,verdict\n";
    char buf[256];
    for (const auto& [name, test] : block.tests) {
        std::snprintf(buf, sizeof(buf), "spmld,glocal,%s,%.17g,%.17g,%s\n", name.c_str(),
                      test.t, test.p, verdict_name(test.verdict));
        os << buf;
    }
}

// ---------------------------------------------------------------------------
// Grid search over the pace schedule, one full train+evaluate per cell at a
// fixed seed. Default grids follow the published search ranges.

struct GridCell {
    double lambda0 = 0.0;
    double gamma0 = 0.0;
    double mu1 = 0.0;
    double mu2 = 0.0;
    MetricsReport report;
};

struct GridResult {
    std::vector<GridCell> cells;
};

inline std::vector<double> default_grid_lambda0() { return {1e-1, 1e-2, 1e-3, 1e-4, 1e-5}; }
inline std::vector<double> default_grid_gamma0() {
    return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
}
inline std::vector<double> default_grid_mu1() { return {1.1, 1.2, 1.3, 1.4, 1.5}; }
inline std::vector<double> default_grid_mu2() { return {0.95, 0.9, 0.85, 0.8, 0.75, 0.7}; }

inline GridResult run_gridsearch(const MultiLabelDataset& full, const RunConfig& cfg) {
    std::vector<double> lams = cfg.grid_lambda0.empty() ? default_grid_lambda0() : cfg.grid_lambda0;
    std::vector<double> gams = cfg.grid_gamma0.empty() ? default_grid_gamma0() : cfg.grid_gamma0;
    std::vector<double> mu1s = cfg.grid_mu1.empty() ? default_grid_mu1() : cfg.grid_mu1;
    std::vector<double> mu2s = cfg.grid_mu2.empty() ? default_grid_mu2() : cfg.grid_mu2;
    if (lams.empty() || gams.empty() || mu1s.empty() || mu2s.empty())
        throw ConfigError("gridsearch: every grid must be nonempty");

    GridResult result;
    const std::uint64_t seed = cfg.seeds.front();
    const double rho = cfg.rho.front();
    for (double lam : lams) {
        for (double gam : gams) {
            for (double m1 : mu1s) {
                for (double m2 : mu2s) {
                    RunConfig cell_cfg = cfg;
                    cell_cfg.lambda0 = lam;
                    cell_cfg.gamma0 = gam;
                    cell_cfg.mu1 = m1;
                    cell_cfg.mu2 = m2;
                    TrainArtifacts art =
                        train_once(full, cell_cfg, seed, FitMode::spmld, rho);
                    GridCell cell;
                    cell.lambda0 = lam;
                    cell.gamma0 = gam;
                    cell.mu1 = m1;
                    cell.mu2 = m2;
                    cell.report = evaluate_model(art.state, art.test);
                    result.cells.push_back(std::move(cell));
                }
            }
        }
    }
    return result;
}

// Rows sorted by metric name first, then grid order.
inline void write_grid_csv(std::ostream& os, const GridResult& result) {
    os << "metric,lambda0,gamma0,mu1,mu2,value\n";
    char buf[256];
    for (const std::string& name : metric_names()) {
        for (const GridCell& cell : result.cells) {
            auto it = cell.report.values.find(name);
            if (it == cell.report.values.end()) continue;
            std::snprintf(buf, sizeof(buf), "%s,%.17g,%.17g,%.17g,%.17g,%.17g\n", name.c_str(),
                          cell.lambda0, cell.gamma0, cell.mu1, cell.mu2, it->second.mean);
            os << buf;
        }
    }
}

// ---------------------------------------------------------------------------
inline std::string make_manifest(const RunConfig& cfg, double wall_seconds) {
    std::ostringstream os;
    os << "# spmld run manifest\n";
    os << dump_config(cfg);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3f", wall_seconds);
    os << "# wall_seconds = " << buf << "\n";
    return os.str();
}

}  // namespace spmld
