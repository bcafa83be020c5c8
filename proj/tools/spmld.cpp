// spmld command-line front end.
//
//   spmld train      --config run.cfg [--seed N] [--out DIR] [--mode spmld|glocal]
//   spmld evaluate   --checkpoint model.ckpt --data test.txt [--normalizer stats.csv]
//   spmld experiment --config run.cfg
//   spmld gridsearch --config run.cfg
//   spmld plot-radar reportA.csv reportB.csv ... --names A,B [--out radar.svg]
//   spmld synth      --d D --n N --l L --k K --g G [--noise R --hard F] --out DIR
//
// Exit codes: 0 success, 1 user/configuration error, 2 numerical failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spmld/checkpoint.hpp"
#include "spmld/config.hpp"
#include "spmld/dataset.hpp"
#include "spmld/errors.hpp"
#include "spmld/experiment.hpp"
#include "spmld/io.hpp"
#include "spmld/metrics.hpp"
#include "spmld/model.hpp"
#include "spmld/optim.hpp"
#include "spmld/svg.hpp"
#include "spmld/synth.hpp"

namespace fs = std::filesystem;

namespace {

struct CommonFlags {
    std::string config_path;
    std::string out_dir;
    std::string mode;
    std::vector<std::string> overrides;  // section.key=value
    long long seed = -1;
    bool pace_diag = false;
};

spmld::RunConfig load_run_config(const CommonFlags& flags, bool config_required = true) {
    spmld::RunConfig cfg;
    if (!flags.config_path.empty()) {
        cfg = spmld::load_config(flags.config_path);
    } else if (config_required) {
        throw spmld::ConfigError("missing --config");
    }
    for (const std::string& entry : flags.overrides) {
        const std::size_t eq = entry.find('=');
        if (eq == std::string::npos)
            throw spmld::ConfigError("--set expects section.key=value, got '" + entry + "'");
        spmld::apply_config_entry(cfg, entry.substr(0, eq), entry.substr(eq + 1));
    }
    if (flags.seed >= 0) cfg.seeds = {static_cast<std::uint64_t>(flags.seed)};
    if (!flags.out_dir.empty()) cfg.out_dir = flags.out_dir;
    if (!flags.mode.empty()) cfg.mode = flags.mode;
    cfg.validate();
    return cfg;
}

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "configuration file (key = value)");
    cmd->add_option("--seed", flags.seed, "override run.seed");
    cmd->add_option("--out", flags.out_dir, "override run.out");
    cmd->add_option("--mode", flags.mode, "override run.mode (spmld|glocal)");
    cmd->add_option("--set", flags.overrides, "override any key: section.key=value");
}

std::string rho_tag(double rho) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", rho);
    return buf;
}

int cmd_train(const CommonFlags& flags) {
    spmld::RunConfig cfg = load_run_config(flags);
    if (cfg.train_path.empty()) throw spmld::ConfigError("data.train is required");
    const spmld::MultiLabelDataset full = spmld::load_dataset(cfg.train_path, cfg);
    const spmld::FitMode mode = spmld::parse_mode(cfg.mode);
    const std::uint64_t seed = cfg.seeds.front();
    const double rho = cfg.rho.front();

    spmld::TrainArtifacts art = spmld::train_once(full, cfg, seed, mode, rho);

    fs::create_directories(cfg.out_dir);
    {
        spmld::Checkpoint ckpt;
        ckpt.d = art.train.dim();
        ckpt.n = art.train.num_instances();
        ckpt.l = art.train.num_labels();
        ckpt.hp = art.hp;
        ckpt.state = art.state;
        std::ofstream out(fs::path(cfg.out_dir) / "checkpoint.ckpt");
        spmld::write_checkpoint(out, ckpt);
    }
    {
        std::ofstream out(fs::path(cfg.out_dir) / "trace.csv");
        spmld::write_trace_csv(out, art.trace);
    }
    {
        std::ofstream out(fs::path(cfg.out_dir) / "partition.csv");
        spmld::write_partition(out, art.partition);
    }
    if (rho < 1.0) {
        std::ofstream out(fs::path(cfg.out_dir) / "mask.csv");
        spmld::write_mask(out, art.train_mask);
    }
    if (flags.pace_diag) {
        std::ofstream out(fs::path(cfg.out_dir) / "pace_diag.csv");
        spmld::write_pace_diag_csv(out, art.trace);
    }
    if (cfg.normalize) {
        std::ofstream out(fs::path(cfg.out_dir) / "normalizer.csv");
        out << "feature,mean,std\n";
        for (std::size_t r = 0; r < art.stats.mean.size(); ++r)
            out << r << ',' << spmld::ioutil::format_double(art.stats.mean[r]) << ','
                << spmld::ioutil::format_double(art.stats.stddev[r]) << "\n";
    }
    {
        std::ofstream out(fs::path(cfg.out_dir) / "manifest.txt");
        out << spmld::make_manifest(cfg, art.wall_seconds);
        out << "# seed = " << seed << "\n";
    }
    std::cout << "train: wrote checkpoint and trace to " << cfg.out_dir << "\n";
    return 0;
}

int cmd_evaluate(const std::string& checkpoint_path, const std::string& data_path,
                 const std::string& normalizer_path, const CommonFlags& flags) {
    spmld::RunConfig cfg = load_run_config(flags, /*config_required=*/false);

    std::ifstream ck(checkpoint_path);
    if (!ck) throw spmld::ConfigError("cannot open checkpoint: " + checkpoint_path);
    const spmld::Checkpoint ckpt = spmld::read_checkpoint(ck);

    spmld::MultiLabelDataset test = spmld::load_dataset(data_path, cfg);
    if (!normalizer_path.empty()) {
        spmld::NormalizerStats stats;
        std::ifstream ns(normalizer_path);
        if (!ns) throw spmld::ConfigError("cannot open normalizer: " + normalizer_path);
        std::string line;
        std::getline(ns, line);  // header
        while (std::getline(ns, line)) {
            const auto parts = spmld::ioutil::split(spmld::ioutil::trim(line), ',');
            if (parts.size() != 3) continue;
            double mean = 0.0;
            double sd = 0.0;
            spmld::ioutil::parse_double(parts[1], mean);
            spmld::ioutil::parse_double(parts[2], sd);
            stats.mean.push_back(mean);
            stats.stddev.push_back(sd);
        }
        test = stats.apply(test);
    }
    if (test.dim() != ckpt.d || test.num_labels() != ckpt.l)
        throw spmld::ShapeError("evaluate: dataset dimensions do not match the checkpoint");

    const spmld::MetricsReport rep = spmld::evaluate_model(ckpt.state, test);
    fs::create_directories(cfg.out_dir);
    std::ofstream out(fs::path(cfg.out_dir) / "report.csv");
    spmld::write_report_csv(out, rep);
    std::cout << "evaluate: wrote " << (fs::path(cfg.out_dir) / "report.csv").string() << "\n";
    return 0;
}

int cmd_experiment(const CommonFlags& flags) {
    spmld::RunConfig cfg = load_run_config(flags);
    if (cfg.train_path.empty()) throw spmld::ConfigError("data.train is required");
    const spmld::MultiLabelDataset full = spmld::load_dataset(cfg.train_path, cfg);

    const spmld::ExperimentResult result = spmld::run_experiment(full, cfg);
    fs::create_directories(cfg.out_dir);
    {
        std::ofstream out(fs::path(cfg.out_dir) / "table.csv");
        spmld::write_experiment_table(out, result);
    }
    for (const spmld::ExperimentBlock& block : result.blocks) {
        const std::string tag = rho_tag(block.rho);
        {
            std::ofstream out(fs::path(cfg.out_dir) / ("report_spmld_rho" + tag + ".csv"));
            spmld::write_report_csv(out, block.spmld);
        }
        {
            std::ofstream out(fs::path(cfg.out_dir) / ("report_glocal_rho" + tag + ".csv"));
            spmld::write_report_csv(out, block.glocal);
        }
        {
            std::ofstream out(fs::path(cfg.out_dir) / ("ttests_rho" + tag + ".csv"));
            spmld::write_ttest_csv(out, block);
        }
    }
    {
        std::ofstream out(fs::path(cfg.out_dir) / "manifest.txt");
        out << spmld::make_manifest(cfg, 0.0);
    }
    std::cout << "experiment: wrote results for " << result.blocks.size()
              << " rho setting(s) to " << cfg.out_dir << "\n";
    return 0;
}

int cmd_gridsearch(const CommonFlags& flags) {
    spmld::RunConfig cfg = load_run_config(flags);
    if (cfg.train_path.empty()) throw spmld::ConfigError("data.train is required");
    const spmld::MultiLabelDataset full = spmld::load_dataset(cfg.train_path, cfg);

    const spmld::GridResult result = spmld::run_gridsearch(full, cfg);
    fs::create_directories(cfg.out_dir);
    std::ofstream out(fs::path(cfg.out_dir) / "grid.csv");
    spmld::write_grid_csv(out, result);
    std::cout << "gridsearch: " << result.cells.size() << " cells -> "
              << (fs::path(cfg.out_dir) / "grid.csv").string() << "\n";
    return 0;
}

int cmd_plot_radar(const std::vector<std::string>& report_paths, const std::string& names_csv,
                   const std::string& out_path, long long labels_override) {
    if (report_paths.size() < 2)
        throw spmld::ConfigError("plot-radar: need at least 2 report files");
    std::vector<std::string> names;
    for (std::string_view tok : spmld::ioutil::split(names_csv, ','))
        if (!spmld::ioutil::trim(tok).empty()) names.emplace_back(spmld::ioutil::trim(tok));
    if (names.empty())
        for (const std::string& p : report_paths) names.push_back(fs::path(p).stem().string());
    if (names.size() != report_paths.size())
        throw spmld::ConfigError("plot-radar: --names count must match the report count");

    std::vector<spmld::MetricsReport> reports;
    for (const std::string& path : report_paths) {
        std::ifstream in(path);
        if (!in) throw spmld::ConfigError("cannot open report: " + path);
        reports.push_back(spmld::read_report_csv(in));
        if (labels_override > 0)
            reports.back().label_count = static_cast<std::size_t>(labels_override);
    }
    const std::string svg = spmld::radar_from_reports(names, reports);
    spmld::write_file(out_path, svg);
    std::cout << "plot-radar: wrote " << out_path << "\n";
    return 0;
}

int cmd_synth(const spmld::SynthSpec& spec, const std::string& out_dir) {
    const spmld::SynthResult result = spmld::synthesize(spec);
    fs::create_directories(out_dir);
    {
        std::ofstream out(fs::path(out_dir) / "synthetic.txt");
        spmld::write_sparse_multilabel(out, result.data);
    }
    {
        std::ofstream out(fs::path(out_dir) / "hard_instances.csv");
        out << "instance_idx\n";
        for (std::size_t j : result.hard_instances) out << j << "\n";
    }
    {
        std::ofstream out(fs::path(out_dir) / "groups.csv");
        for (std::size_t j = 0; j < result.group_of.size(); ++j)
            out << j << ',' << result.group_of[j] << "\n";
    }
    std::cout << "synth: wrote dataset (" << result.data.dim() << "x"
              << result.data.num_instances() << ", " << result.data.num_labels()
              << " labels) to " << out_dir << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"self-paced multi-label learning toolkit"};
    app.require_subcommand(1);

    CommonFlags train_flags;
    CLI::App* train = app.add_subcommand("train", "train one model and write a checkpoint");
    add_common(train, train_flags);
    train->add_flag("--pace-diag", train_flags.pace_diag,
                    "also write per-row pace diagnostics (pace_diag.csv)");

    CommonFlags eval_flags;
    std::string eval_checkpoint;
    std::string eval_data;
    std::string eval_normalizer;
    CLI::App* evaluate = app.add_subcommand("evaluate", "score a checkpoint on a dataset");
    evaluate->add_option("--checkpoint", eval_checkpoint, "model checkpoint")->required();
    evaluate->add_option("--data", eval_data, "dataset to evaluate on")->required();
    evaluate->add_option("--normalizer", eval_normalizer, "normalizer.csv from training");
    add_common(evaluate, eval_flags);

    CommonFlags exp_flags;
    CLI::App* experiment =
        app.add_subcommand("experiment", "multi-seed spmld vs glocal comparison with t-tests");
    add_common(experiment, exp_flags);

    CommonFlags grid_flags;
    CLI::App* gridsearch = app.add_subcommand("gridsearch", "pace-schedule grid search");
    add_common(gridsearch, grid_flags);

    std::vector<std::string> radar_reports;
    std::string radar_names;
    std::string radar_out = "radar.svg";
    long long radar_labels = -1;
    CLI::App* plot = app.add_subcommand("plot-radar", "radar chart from report CSVs");
    plot->add_option("reports", radar_reports, "report CSV files")->required();
    plot->add_option("--names", radar_names, "comma-separated method names");
    plot->add_option("--out", radar_out, "output SVG path");
    plot->add_option("--labels", radar_labels, "label count for coverage normalization");

    spmld::SynthSpec synth_spec;
    std::string synth_out = "synth_out";
    CLI::App* synth = app.add_subcommand("synth", "generate a synthetic dataset");
    synth->add_option("--d", synth_spec.d, "feature dimension");
    synth->add_option("--n", synth_spec.n, "instance count");
    synth->add_option("--l", synth_spec.l, "label count");
    synth->add_option("--k", synth_spec.k, "latent rank");
    synth->add_option("--g", synth_spec.g, "group count");
    synth->add_option("--noise", synth_spec.noise_rate, "flip probability on hard instances");
    synth->add_option("--hard", synth_spec.hard_fraction, "fraction of hard instances");
    synth->add_option("--seed", synth_spec.seed, "generator seed");
    synth->add_option("--out", synth_out, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (train->parsed()) return cmd_train(train_flags);
        if (evaluate->parsed())
            return cmd_evaluate(eval_checkpoint, eval_data, eval_normalizer, eval_flags);
        if (experiment->parsed()) return cmd_experiment(exp_flags);
        if (gridsearch->parsed()) return cmd_gridsearch(grid_flags);
        if (plot->parsed())
            return cmd_plot_radar(radar_reports, radar_names, radar_out, radar_labels);
        if (synth->parsed()) return cmd_synth(synth_spec, synth_out);
    } catch (const spmld::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 2;
    } catch (const spmld::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
