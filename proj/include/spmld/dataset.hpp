#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "spmld/errors.hpp"
#include "spmld/matrix.hpp"
#include "spmld/rng.hpp"

namespace spmld {

// Instances are columns: features is d x n, labels and mask are l x n.
// Labels are +-1 in memory regardless of file encoding; mask entries are 0/1
// with 1 meaning the label cell is observed.
struct MultiLabelDataset {
    Matrix features;
    Matrix labels;
    Matrix mask;
    std::vector<std::string> feature_names;
    std::vector<std::string> label_names;

    std::size_t dim() const { return features.rows(); }
    std::size_t num_instances() const { return features.cols(); }
    std::size_t num_labels() const { return labels.rows(); }

    void validate() const {
        if (dim() < 1 || num_instances() < 1 || num_labels() < 1)
            throw InvariantError("dataset: d, n, l must all be >= 1");
        if (labels.cols() != num_instances() || mask.cols() != num_instances())
            throw InvariantError("dataset: instance count mismatch between blocks");
        if (mask.rows() != num_labels())
            throw InvariantError("dataset: label count mismatch between labels and mask");
        for (double y : labels.raw())
            if (y != 1.0 && y != -1.0)
                throw InvariantError("dataset: label entries must be exactly -1 or +1");
        for (double j : mask.raw())
            if (j != 0.0 && j != 1.0)
                throw InvariantError("dataset: mask entries must be exactly 0 or 1");
        if (!feature_names.empty() && feature_names.size() != dim())
            throw InvariantError("dataset: feature name count mismatch");
        if (!label_names.empty() && label_names.size() != num_labels())
            throw InvariantError("dataset: label name count mismatch");
    }
};

struct SplitSpec {
    double train_fraction = 0.7;
    std::uint64_t seed = 0;
};

// Keeps exactly round(rho * l * n) cells observed, chosen by a seeded shuffle
// of all cells so the count is exact and reruns reproduce the same mask.
inline MultiLabelDataset mask_labels(const MultiLabelDataset& ds, double rho,
                                     std::uint64_t seed) {
    for (double j : ds.mask.raw())
        if (j != 1.0) throw DomainError("mask_labels: dataset already has missing labels");
    if (rho < 0.0 || rho > 1.0) throw DomainError("mask_labels: rho outside [0, 1]");

    const std::size_t cells = ds.mask.size();
    const auto keep = static_cast<std::size_t>(std::llround(rho * static_cast<double>(cells)));
    std::vector<std::size_t> order(cells);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(seed);
    rng.shuffle(order);

    MultiLabelDataset out = ds;
    for (double& j : out.mask.raw()) j = 0.0;
    for (std::size_t i = 0; i < keep; ++i) out.mask.raw()[order[i]] = 1.0;
    return out;
}

// Seeded permutation split over instance columns; train gets
// floor(train_fraction * n).
inline std::pair<MultiLabelDataset, MultiLabelDataset> split(const MultiLabelDataset& ds,
                                                             const SplitSpec& spec) {
    if (spec.train_fraction <= 0.0 || spec.train_fraction >= 1.0)
        throw ConfigError("split: train_fraction must lie strictly in (0, 1)");
    const std::size_t n = ds.num_instances();
    const auto n_train = static_cast<std::size_t>(
        std::floor(spec.train_fraction * static_cast<double>(n)));
    if (n_train == 0 || n_train == n)
        throw ConfigError("split: a split side would be empty");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(spec.seed);
    rng.shuffle(order);

    std::vector<std::size_t> train_idx(order.begin(), order.begin() + n_train);
    std::vector<std::size_t> test_idx(order.begin() + n_train, order.end());
    std::sort(train_idx.begin(), train_idx.end());
    std::sort(test_idx.begin(), test_idx.end());

    auto take = [&](const std::vector<std::size_t>& idx) {
        MultiLabelDataset part;
        part.features = gather_columns(ds.features, idx);
        part.labels = gather_columns(ds.labels, idx);
        part.mask = gather_columns(ds.mask, idx);
        part.feature_names = ds.feature_names;
        part.label_names = ds.label_names;
        return part;
    };
    return {take(train_idx), take(test_idx)};
}

// Per-feature shift/scale fitted on training instances only.
struct NormalizerStats {
    std::vector<double> mean;
    std::vector<double> stddev;  // population std; 0 marks a constant feature

    MultiLabelDataset apply(const MultiLabelDataset& ds) const {
        if (ds.dim() != mean.size())
            throw ShapeError("normalizer: feature dimension mismatch");
        MultiLabelDataset out = ds;
        for (std::size_t r = 0; r < mean.size(); ++r) {
            for (std::size_t c = 0; c < out.features.cols(); ++c) {
                out.features(r, c) =
                    stddev[r] == 0.0 ? 0.0 : (out.features(r, c) - mean[r]) / stddev[r];
            }
        }
        return out;
    }
};

inline std::pair<MultiLabelDataset, NormalizerStats> normalize_features(
    const MultiLabelDataset& ds) {
    const std::size_t d = ds.dim();
    const std::size_t n = ds.num_instances();
    NormalizerStats stats;
    stats.mean.resize(d);
    stats.stddev.resize(d);
    for (std::size_t r = 0; r < d; ++r) {
        double sum = 0.0;
        for (std::size_t c = 0; c < n; ++c) sum += ds.features(r, c);
        const double mean = sum / static_cast<double>(n);
        double var = 0.0;
        for (std::size_t c = 0; c < n; ++c) {
            const double dev = ds.features(r, c) - mean;
            var += dev * dev;
        }
        var /= static_cast<double>(n);
        stats.mean[r] = mean;
        stats.stddev[r] = var > 0.0 ? std::sqrt(var) : 0.0;
    }
    return {stats.apply(ds), stats};
}

}  // namespace spmld
