#pragma once

#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "spmld/errors.hpp"
#include "spmld/io.hpp"
#include "spmld/model.hpp"
#include "spmld/optim.hpp"

namespace spmld {

// Line-based `key = value` configuration with `[section]` headers. Every key
// is validated against the table below and unknown keys are rejected; the
// parsed file doubles as the reproducibility manifest.
struct RunConfig {
    // [data]
    std::string train_path;
    std::string test_path;            // optional; when empty the split is used
    std::string format = "sparse";    // sparse | arff
    std::size_t arff_labels = 1;
    std::vector<double> rho = {1.0};  // observed fraction(s); experiment iterates
    double split_fraction = 0.7;
    bool normalize = true;

    // [partition]
    std::size_t groups = 4;
    std::string partition_method = "kmeans";  // kmeans | file
    std::string partition_file;
    std::size_t kmeans_iters = 100;

    // [model]
    std::size_t k = 0;  // 0 = min(l, 20)
    std::size_t m = 0;  // 0 = min(l, 20)
    double alpha = 1.0;
    double beta1 = 0.5;
    double beta2 = 0.5;
    double tau = 1e-3;

    // [pace]
    double lambda0 = 1e-2;
    double gamma0 = 1.0;
    double mu1 = 1.2;
    double mu2 = 0.9;

    // [optim]
    OptimConfig optim;

    // [run]
    std::string mode = "spmld";  // spmld | glocal
    std::vector<std::uint64_t> seeds = {1};
    std::string out_dir = "out";

    // [grid] value lists for cmd_gridsearch; empty means the default grids
    std::vector<double> grid_lambda0;
    std::vector<double> grid_gamma0;
    std::vector<double> grid_mu1;
    std::vector<double> grid_mu2;

    HyperParams hyperparams(std::size_t l) const {
        HyperParams hp;
        hp.alpha = alpha;
        hp.beta1 = beta1;
        hp.beta2 = beta2;
        hp.tau = tau;
        hp.k = k == 0 ? std::min<std::size_t>(l, 20) : k;
        hp.m = m == 0 ? std::min<std::size_t>(l, 20) : m;
        hp.g = groups;
        hp.validate();
        return hp;
    }

    void validate() const {
        if (format != "sparse" && format != "arff")
            throw ConfigError("data.format must be 'sparse' or 'arff'");
        if (rho.empty()) throw ConfigError("data.rho must list at least one value");
        for (double r : rho)
            if (r < 0.0 || r > 1.0) throw ConfigError("data.rho values must lie in [0, 1]");
        if (split_fraction <= 0.0 || split_fraction >= 1.0)
            throw ConfigError("data.split_fraction must lie strictly in (0, 1)");
        if (groups < 1) throw ConfigError("partition.groups must be >= 1");
        if (partition_method != "kmeans" && partition_method != "file")
            throw ConfigError("partition.method must be 'kmeans' or 'file'");
        if (partition_method == "file" && partition_file.empty())
            throw ConfigError("partition.method = file requires partition.file");
        if (alpha < 0.0 || beta1 < 0.0 || beta2 < 0.0 || tau < 0.0)
            throw ConfigError("model weights must be >= 0");
        if (!(lambda0 > 0.0)) throw ConfigError("pace.lambda0 must be > 0");
        if (gamma0 < 0.0) throw ConfigError("pace.gamma0 must be >= 0");
        if (mu1 < 1.0) throw ConfigError("pace.mu1 must be >= 1");
        if (!(mu2 > 0.0 && mu2 <= 1.0)) throw ConfigError("pace.mu2 must lie in (0, 1]");
        optim.validate();
        if (mode != "spmld" && mode != "glocal")
            throw ConfigError("run.mode must be 'spmld' or 'glocal'");
        if (seeds.empty()) throw ConfigError("run.seeds must list at least one seed");
    }
};

namespace detail {

inline std::vector<double> parse_double_list(const std::string& value, const std::string& key) {
    std::vector<double> out;
    for (std::string_view tok : ioutil::split(value, ',')) {
        tok = ioutil::trim(tok);
        if (tok.empty()) continue;
        double v = 0.0;
        if (!ioutil::parse_double(tok, v))
            throw ConfigError(key + ": malformed number '" + std::string(tok) + "'");
        out.push_back(v);
    }
    if (out.empty()) throw ConfigError(key + ": empty list");
    return out;
}

// "1,2,3" or "1..10"
inline std::vector<std::uint64_t> parse_seed_list(const std::string& value,
                                                  const std::string& key) {
    std::vector<std::uint64_t> out;
    const std::size_t dots = value.find("..");
    if (dots != std::string::npos) {
        std::size_t lo = 0;
        std::size_t hi = 0;
        if (!ioutil::parse_size(ioutil::trim(std::string_view(value).substr(0, dots)), lo) ||
            !ioutil::parse_size(ioutil::trim(std::string_view(value).substr(dots + 2)), hi) ||
            hi < lo)
            throw ConfigError(key + ": malformed range '" + value + "'");
        for (std::size_t s = lo; s <= hi; ++s) out.push_back(s);
        return out;
    }
    for (std::string_view tok : ioutil::split(value, ',')) {
        tok = ioutil::trim(tok);
        if (tok.empty()) continue;
        std::size_t v = 0;
        if (!ioutil::parse_size(tok, v))
            throw ConfigError(key + ": malformed seed '" + std::string(tok) + "'");
        out.push_back(v);
    }
    if (out.empty()) throw ConfigError(key + ": empty list");
    return out;
}

inline double parse_one_double(const std::string& value, const std::string& key) {
    double v = 0.0;
    if (!ioutil::parse_double(ioutil::trim(value), v))
        throw ConfigError(key + ": malformed number '" + value + "'");
    return v;
}

inline std::size_t parse_one_size(const std::string& value, const std::string& key) {
    std::size_t v = 0;
    if (!ioutil::parse_size(ioutil::trim(value), v))
        throw ConfigError(key + ": malformed integer '" + value + "'");
    return v;
}

inline bool parse_bool(const std::string& value, const std::string& key) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw ConfigError(key + ": expected a boolean, got '" + value + "'");
}

}  // namespace detail

// Applies one `section.key = value` assignment. Shared by the file loader
// and the CLI `--set` override path.
inline void apply_config_entry(RunConfig& cfg, const std::string& key,
                               const std::string& value) {
    using namespace detail;
    if (key == "data.train") cfg.train_path = value;
    else if (key == "data.test") cfg.test_path = value;
    else if (key == "data.format") cfg.format = value;
    else if (key == "data.arff_labels") cfg.arff_labels = parse_one_size(value, key);
    else if (key == "data.rho") cfg.rho = parse_double_list(value, key);
    else if (key == "data.split_fraction") cfg.split_fraction = parse_one_double(value, key);
    else if (key == "data.normalize") cfg.normalize = parse_bool(value, key);
    else if (key == "partition.groups") cfg.groups = parse_one_size(value, key);
    else if (key == "partition.method") cfg.partition_method = value;
    else if (key == "partition.file") cfg.partition_file = value;
    else if (key == "partition.kmeans_iters") cfg.kmeans_iters = parse_one_size(value, key);
    else if (key == "model.k") cfg.k = parse_one_size(value, key);
    else if (key == "model.m") cfg.m = parse_one_size(value, key);
    else if (key == "model.alpha") cfg.alpha = parse_one_double(value, key);
    else if (key == "model.beta1") cfg.beta1 = parse_one_double(value, key);
    else if (key == "model.beta2") cfg.beta2 = parse_one_double(value, key);
    else if (key == "model.tau") cfg.tau = parse_one_double(value, key);
    else if (key == "pace.lambda0") cfg.lambda0 = parse_one_double(value, key);
    else if (key == "pace.gamma0") cfg.gamma0 = parse_one_double(value, key);
    else if (key == "pace.mu1") cfg.mu1 = parse_one_double(value, key);
    else if (key == "pace.mu2") cfg.mu2 = parse_one_double(value, key);
    else if (key == "optim.max_outer_iters") cfg.optim.max_outer_iters = parse_one_size(value, key);
    else if (key == "optim.inner_steps") cfg.optim.inner_steps_per_block = parse_one_size(value, key);
    else if (key == "optim.armijo_c") cfg.optim.armijo_c = parse_one_double(value, key);
    else if (key == "optim.backtrack_ratio") cfg.optim.backtrack_ratio = parse_one_double(value, key);
    else if (key == "optim.rel_tol") cfg.optim.rel_tol = parse_one_double(value, key);
    else if (key == "run.mode") cfg.mode = value;
    else if (key == "run.seed") cfg.seeds = {parse_one_size(value, key)};
    else if (key == "run.seeds") cfg.seeds = parse_seed_list(value, key);
    else if (key == "run.out") cfg.out_dir = value;
    else if (key == "grid.lambda0") cfg.grid_lambda0 = parse_double_list(value, key);
    else if (key == "grid.gamma0") cfg.grid_gamma0 = parse_double_list(value, key);
    else if (key == "grid.mu1") cfg.grid_mu1 = parse_double_list(value, key);
    else if (key == "grid.mu2") cfg.grid_mu2 = parse_double_list(value, key);
    else throw ConfigError("unknown configuration key '" + key + "'");
}

inline RunConfig parse_config(std::istream& in) {
    RunConfig cfg;
    std::string line;
    std::string section;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view = ioutil::trim(line);
        if (view.empty() || view.front() == '#' || view.front() == ';') continue;
        if (view.front() == '[') {
            if (view.back() != ']')
                throw ConfigError("line " + std::to_string(line_no) + ": malformed section");
            section = std::string(ioutil::trim(view.substr(1, view.size() - 2)));
            continue;
        }
        const std::size_t eq = view.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
        const std::string key = std::string(ioutil::trim(view.substr(0, eq)));
        const std::string value = std::string(ioutil::trim(view.substr(eq + 1)));
        if (key.empty())
            throw ConfigError("line " + std::to_string(line_no) + ": empty key");
        const std::string full_key = section.empty() ? key : section + "." + key;
        apply_config_entry(cfg, full_key, value);
    }
    return cfg;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    return parse_config(in);
}

// Normalized echo of every setting, written into run manifests.
inline std::string dump_config(const RunConfig& cfg) {
    std::ostringstream os;
    auto list = [](const auto& values) {
        std::ostringstream ls;
        for (std::size_t i = 0; i < values.size(); ++i)
            ls << (i ? "," : "") << ioutil::format_double(static_cast<double>(values[i]));
        return ls.str();
    };
    os << "[data]\n";
    os << "train = " << cfg.train_path << "\n";
    os << "test = " << cfg.test_path << "\n";
    os << "format = " << cfg.format << "\n";
    os << "arff_labels = " << cfg.arff_labels << "\n";
    os << "rho = " << list(cfg.rho) << "\n";
    os << "split_fraction = " << ioutil::format_double(cfg.split_fraction) << "\n";
    os << "normalize = " << (cfg.normalize ? "true" : "false") << "\n";
    os << "[partition]\n";
    os << "groups = " << cfg.groups << "\n";
    os << "method = " << cfg.partition_method << "\n";
    os << "file = " << cfg.partition_file << "\n";
    os << "kmeans_iters = " << cfg.kmeans_iters << "\n";
    os << "[model]\n";
    os << "k = " << cfg.k << "\n";
    os << "m = " << cfg.m << "\n";
    os << "alpha = " << ioutil::format_double(cfg.alpha) << "\n";
    os << "beta1 = " << ioutil::format_double(cfg.beta1) << "\n";
    os << "beta2 = " << ioutil::format_double(cfg.beta2) << "\n";
    os << "tau = " << ioutil::format_double(cfg.tau) << "\n";
    os << "[pace]\n";
    os << "lambda0 = " << ioutil::format_double(cfg.lambda0) << "\n";
    os << "gamma0 = " << ioutil::format_double(cfg.gamma0) << "\n";
    os << "mu1 = " << ioutil::format_double(cfg.mu1) << "\n";
    os << "mu2 = " << ioutil::format_double(cfg.mu2) << "\n";
    os << "[optim]\n";
    os << "max_outer_iters = " << cfg.optim.max_outer_iters << "\n";
    os << "inner_steps = " << cfg.optim.inner_steps_per_block << "\n";
    os << "armijo_c = " << ioutil::format_double(cfg.optim.armijo_c) << "\n";
    os << "backtrack_ratio = " << ioutil::format_double(cfg.optim.backtrack_ratio) << "\n";
    os << "rel_tol = " << ioutil::format_double(cfg.optim.rel_tol) << "\n";
    os << "[run]\n";
    os << "mode = " << cfg.mode << "\n";
    {
        std::ostringstream ss;
        for (std::size_t i = 0; i < cfg.seeds.size(); ++i)
            ss << (i ? "," : "") << cfg.seeds[i];
        os << "seeds = " << ss.str() << "\n";
    }
    os << "out = " << cfg.out_dir << "\n";
    if (!cfg.grid_lambda0.empty() || !cfg.grid_gamma0.empty() || !cfg.grid_mu1.empty() ||
        !cfg.grid_mu2.empty()) {
        os << "[grid]\n";
        if (!cfg.grid_lambda0.empty()) os << "lambda0 = " << list(cfg.grid_lambda0) << "\n";
        if (!cfg.grid_gamma0.empty()) os << "gamma0 = " << list(cfg.grid_gamma0) << "\n";
        if (!cfg.grid_mu1.empty()) os << "mu1 = " << list(cfg.grid_mu1) << "\n";
        if (!cfg.grid_mu2.empty()) os << "mu2 = " << list(cfg.grid_mu2) << "\n";
    }
    return os.str();
}

}  // namespace spmld
