#pragma once

#include <cstdint>
#include <numeric>
#include <vector>

#include "spmld/dataset.hpp"
#include "spmld/errors.hpp"
#include "spmld/matrix.hpp"
#include "spmld/model.hpp"
#include "spmld/rng.hpp"

namespace spmld {

struct SynthSpec {
    std::size_t d = 20;
    std::size_t n = 200;
    std::size_t l = 10;
    std::size_t k = 3;
    std::size_t g = 2;
    double noise_rate = 0.0;     // per-label flip probability on hard instances
    double hard_fraction = 0.0;  // fraction of instances that carry the noise
    std::uint64_t seed = 0;
};

struct SynthResult {
    MultiLabelDataset data;
    ModelState truth;                        // generating U, V, W (Z is a placeholder)
    std::vector<std::size_t> hard_instances;  // ascending indices
    std::vector<std::size_t> group_of;        // generating cluster per instance
};

// Test bed with planted easy/hard structure: instances cluster around g
// well-separated centers, labels come from a rank-k model Y = sign(U W^T X),
// and a hard_fraction of instances get each label flipped independently with
// probability noise_rate. Clean instances stay exactly consistent with the
// generating model.
inline SynthResult synthesize(const SynthSpec& spec) {
    if (spec.k > std::min(spec.d, spec.l))
        throw ConfigError("synthesize: k must not exceed min(d, l)");
    if (spec.noise_rate < 0.0 || spec.noise_rate > 1.0 || spec.hard_fraction < 0.0 ||
        spec.hard_fraction > 1.0)
        throw ConfigError("synthesize: rates must lie in [0, 1]");
    if (spec.d < 1 || spec.n < 1 || spec.l < 1 || spec.k < 1 || spec.g < 1)
        throw ConfigError("synthesize: dimensions must be >= 1");

    Rng rng(spec.seed);
    SynthResult out;

    Matrix centers(spec.d, spec.g);
    for (double& v : centers.raw()) v = 4.0 * rng.normal();

    out.group_of.resize(spec.n);
    Matrix x(spec.d, spec.n);
    for (std::size_t j = 0; j < spec.n; ++j) {
        const std::size_t b = rng.uniform_index(spec.g);
        out.group_of[j] = b;
        for (std::size_t r = 0; r < spec.d; ++r) x(r, j) = centers(r, b) + rng.normal();
    }

    Matrix w(spec.d, spec.k);
    const double w_scale = 1.0 / std::sqrt(static_cast<double>(spec.d));
    for (double& v : w.raw()) v = w_scale * rng.normal();
    Matrix u(spec.l, spec.k);
    for (double& v : u.raw()) v = rng.normal();

    Matrix v_latent = matmul_tn(w, x);
    for (double& value : v_latent.raw()) value += 0.01 * rng.normal();

    Matrix scores = matmul(u, v_latent);
    Matrix labels = scores;
    for (double& s : labels.raw()) s = s < 0.0 ? -1.0 : 1.0;

    // pick round(hard_fraction * n) hard instances by a seeded shuffle
    std::vector<std::size_t> order(spec.n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(order);
    const auto n_hard = static_cast<std::size_t>(
        std::llround(spec.hard_fraction * static_cast<double>(spec.n)));
    out.hard_instances.assign(order.begin(), order.begin() + n_hard);
    std::sort(out.hard_instances.begin(), out.hard_instances.end());

    for (std::size_t j : out.hard_instances)
        for (std::size_t i = 0; i < spec.l; ++i)
            if (rng.uniform01() < spec.noise_rate) labels(i, j) = -labels(i, j);

    out.data.features = std::move(x);
    out.data.labels = std::move(labels);
    out.data.mask = Matrix(spec.l, spec.n, 1.0);
    out.data.validate();

    out.truth.U = std::move(u);
    out.truth.V = std::move(v_latent);
    out.truth.W = std::move(w);
    out.truth.Z.assign(spec.g, Matrix(spec.l, 1, 1.0));
    return out;
}

}  // namespace spmld
