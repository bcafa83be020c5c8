#pragma once

#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include "spmld/dataset.hpp"
#include "spmld/errors.hpp"
#include "spmld/matrix.hpp"
#include "spmld/rng.hpp"

namespace spmld {

struct GroupPartition {
    std::vector<std::size_t> assignment;  // length n, values in [0, g)
    std::vector<std::size_t> sizes;       // length g, all nonzero

    std::size_t num_groups() const { return sizes.size(); }
    std::size_t num_instances() const { return assignment.size(); }

    void validate() const {
        std::vector<std::size_t> counts(sizes.size(), 0);
        for (std::size_t a : assignment) {
            if (a >= sizes.size()) throw InvariantError("partition: group id out of range");
            ++counts[a];
        }
        for (std::size_t b = 0; b < sizes.size(); ++b) {
            if (counts[b] != sizes[b]) throw InvariantError("partition: sizes inconsistent");
            if (sizes[b] == 0) throw InvariantError("partition: empty group");
        }
    }
};

inline GroupPartition partition_from_assignment(std::vector<std::size_t> assignment,
                                                std::size_t groups) {
    GroupPartition part;
    part.sizes.assign(groups, 0);
    for (std::size_t a : assignment) {
        if (a >= groups) throw RangeError("partition: group id out of range");
        ++part.sizes[a];
    }
    part.assignment = std::move(assignment);
    part.validate();
    return part;
}

struct KmeansResult {
    GroupPartition partition;
    Matrix centers;                       // d x g
    std::vector<double> objective_trace;  // sum of squared distances per Lloyd iteration
};

namespace detail {

inline double sq_distance_col(const Matrix& points, std::size_t col, const Matrix& centers,
                              std::size_t center) {
    double acc = 0.0;
    for (std::size_t r = 0; r < points.rows(); ++r) {
        const double d = points(r, col) - centers(r, center);
        acc += d * d;
    }
    return acc;
}

}  // namespace detail

// Lloyd's algorithm with k-means++ seeding. Empty clusters are reseeded to
// the point farthest from that cluster's center, which keeps every group
// nonempty as the downstream group weights n_b/n require.
inline KmeansResult kmeans_full(const Matrix& features, std::size_t g, std::uint64_t seed,
                                std::size_t max_iters = 100) {
    const std::size_t n = features.cols();
    const std::size_t d = features.rows();
    if (g < 1 || g > n) throw ConfigError("kmeans: need 1 <= g <= n");

    Rng rng(seed);
    Matrix centers(d, g);

    // k-means++ seeding
    std::vector<double> dist2(n, std::numeric_limits<double>::max());
    {
        const std::size_t first = rng.uniform_index(n);
        for (std::size_t r = 0; r < d; ++r) centers(r, 0) = features(r, first);
        for (std::size_t b = 1; b < g; ++b) {
            double total = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                dist2[j] = std::min(dist2[j], detail::sq_distance_col(features, j, centers, b - 1));
                total += dist2[j];
            }
            std::size_t chosen = 0;
            if (total > 0.0) {
                const double target = rng.uniform01() * total;
                double acc = 0.0;
                chosen = n - 1;
                for (std::size_t j = 0; j < n; ++j) {
                    acc += dist2[j];
                    if (acc >= target) {
                        chosen = j;
                        break;
                    }
                }
            } else {
                chosen = rng.uniform_index(n);
            }
            for (std::size_t r = 0; r < d; ++r) centers(r, b) = features(r, chosen);
        }
    }

    std::vector<std::size_t> assignment(n, 0);
    KmeansResult result;

    for (std::size_t iter = 0; iter < max_iters; ++iter) {
        std::vector<std::size_t> next(n);
        for (std::size_t j = 0; j < n; ++j) {
            double best = std::numeric_limits<double>::max();
            std::size_t arg = 0;
            for (std::size_t b = 0; b < g; ++b) {
                const double d2 = detail::sq_distance_col(features, j, centers, b);
                if (d2 < best) {
                    best = d2;
                    arg = b;
                }
            }
            next[j] = arg;
        }

        std::vector<std::size_t> counts(g, 0);
        for (std::size_t a : next) ++counts[a];
        for (std::size_t b = 0; b < g; ++b) {
            if (counts[b] > 0) continue;
            double far = -1.0;
            std::size_t far_j = 0;
            for (std::size_t j = 0; j < n; ++j) {
                if (counts[next[j]] <= 1) continue;  // keep donors nonempty
                const double d2 = detail::sq_distance_col(features, j, centers, b);
                if (d2 > far) {
                    far = d2;
                    far_j = j;
                }
            }
            --counts[next[far_j]];
            next[far_j] = b;
            ++counts[b];
            for (std::size_t r = 0; r < d; ++r) centers(r, b) = features(r, far_j);
        }

        const bool fixpoint = iter > 0 && next == assignment;
        assignment = std::move(next);

        // mean update
        centers = Matrix(d, g);
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t r = 0; r < d; ++r) centers(r, assignment[j]) += features(r, j);
        for (std::size_t b = 0; b < g; ++b)
            for (std::size_t r = 0; r < d; ++r)
                centers(r, b) /= static_cast<double>(counts[b]);

        double objective = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            objective += detail::sq_distance_col(features, j, centers, assignment[j]);
        result.objective_trace.push_back(objective);

        if (fixpoint) break;
    }

    result.partition = partition_from_assignment(assignment, g);
    result.centers = centers;
    return result;
}

inline GroupPartition kmeans(const Matrix& features, std::size_t g, std::uint64_t seed,
                             std::size_t max_iters = 100) {
    return kmeans_full(features, g, seed, max_iters).partition;
}

// Ascending instance indices of group b.
inline std::vector<std::size_t> group_columns(const GroupPartition& part, std::size_t b) {
    if (b >= part.num_groups()) throw RangeError("group_columns: group index out of range");
    std::vector<std::size_t> idx;
    idx.reserve(part.sizes[b]);
    for (std::size_t j = 0; j < part.assignment.size(); ++j)
        if (part.assignment[j] == b) idx.push_back(j);
    return idx;
}

}  // namespace spmld
