#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "spmld/dataset.hpp"
#include "spmld/errors.hpp"
#include "spmld/matrix.hpp"
#include "spmld/partition.hpp"
#include "spmld/rng.hpp"

namespace spmld {

struct HyperParams {
    double alpha = 1.0;   // latent regression weight
    double beta1 = 0.5;   // global correlation weight
    double beta2 = 0.5;   // local correlation weight
    double tau = 1e-3;    // Frobenius regularization
    std::size_t k = 0;    // latent label dimension
    std::size_t m = 0;    // correlation factor rank
    std::size_t g = 1;    // group count

    void validate() const {
        if (k < 1 || m < 1 || g < 1)
            throw ConfigError("hyperparams: k, m, g must all be >= 1");
        if (alpha < 0.0 || beta1 < 0.0 || beta2 < 0.0 || tau < 0.0)
            throw ConfigError("hyperparams: regularization weights must be >= 0");
    }
};

// U: l x k, V: k x n, W: d x k, Z[b]: l x m with unit-norm rows.
struct ModelState {
    Matrix U;
    Matrix V;
    Matrix W;
    std::vector<Matrix> Z;

    static constexpr double kUnitRowTol = 1e-10;

    void validate_unit_rows() const {
        for (const Matrix& z : Z) {
            for (std::size_t r = 0; r < z.rows(); ++r) {
                double norm2 = 0.0;
                for (std::size_t c = 0; c < z.cols(); ++c) norm2 += z(r, c) * z(r, c);
                if (std::abs(std::sqrt(norm2) - 1.0) > kUnitRowTol)
                    throw InvariantError("model: a Z row is not unit norm");
            }
        }
    }
};

// Instance-label pace weights plus the annealing schedule. P is k x n: one
// row per latent label, matching the elementwise product with V - W^T X.
struct PaceState {
    Matrix P;
    double lambda = 1e-2;
    double gamma = 1.0;
    double mu1 = 1.2;
    double mu2 = 0.9;

    void validate() const {
        if (!(lambda > 0.0)) throw ConfigError("pace: lambda must be > 0");
        if (gamma < 0.0) throw ConfigError("pace: gamma must be >= 0");
        if (mu1 < 1.0) throw ConfigError("pace: mu1 must be >= 1");
        if (!(mu2 > 0.0 && mu2 <= 1.0)) throw ConfigError("pace: mu2 must lie in (0, 1]");
        for (double p : P.raw())
            if (!(p >= 0.0 && p <= 1.0))
                throw InvariantError("pace: weights must lie in [0, 1]");
    }
};

inline PaceState make_pace(std::size_t k, std::size_t n, double lambda, double gamma,
                           double mu1, double mu2) {
    PaceState pace;
    pace.P = Matrix(k, n, 1.0);
    pace.lambda = lambda;
    pace.gamma = gamma;
    pace.mu1 = mu1;
    pace.mu2 = mu2;
    return pace;
}

// Scores F = U W^T X for the given feature columns.
inline Matrix predict_scores(const ModelState& state, const Matrix& features) {
    if (state.W.rows() != features.rows())
        throw ShapeError("predict_scores: feature dimension does not match W");
    if (state.U.cols() != state.W.cols())
        throw ShapeError("predict_scores: U and W disagree on k");
    return matmul(state.U, matmul_tn(state.W, features));
}

// sign(score) with sign(0) = +1.
inline Matrix predict_labels(const Matrix& scores) {
    Matrix out = scores;
    for (double& v : out.raw()) v = v < 0.0 ? -1.0 : 1.0;
    return out;
}

// Per-cell pace losses: entry (i, j) = alpha * (V_ij - (W^T X)_ij)^2.
inline Matrix residual_loss(const ModelState& state, const MultiLabelDataset& ds,
                            const HyperParams& hp) {
    if (state.V.cols() != ds.num_instances())
        throw ShapeError("residual_loss: V and dataset disagree on n");
    Matrix wx = matmul_tn(state.W, ds.features);
    Matrix out = state.V;
    for (std::size_t i = 0; i < out.raw().size(); ++i) {
        const double diff = out.raw()[i] - wx.raw()[i];
        out.raw()[i] = hp.alpha * diff * diff;
    }
    return out;
}

struct ObjectiveTerms {
    double recon = 0.0;        // ||J o (Y - UV)||_F^2
    double residual = 0.0;     // alpha ||sqrt(P) o (V - W^T X)||_F^2
    double global_corr = 0.0;  // sum_b (beta1 n_b / n) tr(F^T Z_b Z_b^T F)
    double local_corr = 0.0;   // sum_b beta2 tr(F_b^T Z_b Z_b^T F_b)
    double pace_l1 = 0.0;      // -lambda sum_i ||P^(i)||_1
    double pace_l2 = 0.0;      // +gamma sum_i ||P^(i)||_2
    double reg = 0.0;          // tau (||U||^2 + ||V||^2 + ||W||^2)

    // Everything the U/V/W/Z blocks can move. The pace terms are constant
    // while those blocks update, so line search compares this part.
    double model_part() const { return recon + residual + global_corr + local_corr + reg; }
    double total() const { return model_part() + pace_l1 + pace_l2; }
};

inline ObjectiveTerms objective_terms(const ModelState& state, const PaceState& pace,
                                      const MultiLabelDataset& ds, const GroupPartition& part,
                                      const HyperParams& hp) {
    const std::size_t n = ds.num_instances();
    if (state.V.cols() != n || part.num_instances() != n)
        throw ShapeError("objective: instance count mismatch");
    if (pace.P.rows() != state.V.rows() || pace.P.cols() != n)
        throw ShapeError("objective: pace matrix must be k x n");
    state.validate_unit_rows();

    ObjectiveTerms terms;

    Matrix uv = matmul(state.U, state.V);
    for (std::size_t i = 0; i < uv.raw().size(); ++i) {
        const double diff = ds.labels.raw()[i] - uv.raw()[i];
        terms.recon += ds.mask.raw()[i] * diff * diff;
    }

    Matrix wx = matmul_tn(state.W, ds.features);
    for (std::size_t i = 0; i < wx.raw().size(); ++i) {
        const double diff = state.V.raw()[i] - wx.raw()[i];
        terms.residual += pace.P.raw()[i] * diff * diff;
    }
    terms.residual *= hp.alpha;

    Matrix f = matmul(state.U, wx);  // l x n
    for (std::size_t b = 0; b < part.num_groups(); ++b) {
        const double weight_b =
            hp.beta1 * static_cast<double>(part.sizes[b]) / static_cast<double>(n);
        if (weight_b != 0.0) terms.global_corr += weight_b * matmul_tn(state.Z[b], f).frob2();
        if (hp.beta2 != 0.0) {
            Matrix fb = gather_columns(f, group_columns(part, b));
            terms.local_corr += hp.beta2 * matmul_tn(state.Z[b], fb).frob2();
        }
    }

    for (double p : pace.P.raw()) terms.pace_l1 += p;
    terms.pace_l1 *= -pace.lambda;
    for (std::size_t i = 0; i < pace.P.rows(); ++i) {
        double row2 = 0.0;
        for (std::size_t j = 0; j < pace.P.cols(); ++j) row2 += pace.P(i, j) * pace.P(i, j);
        terms.pace_l2 += std::sqrt(row2);
    }
    terms.pace_l2 *= pace.gamma;

    terms.reg = hp.tau * (state.U.frob2() + state.V.frob2() + state.W.frob2());
    return terms;
}

inline double objective(const ModelState& state, const PaceState& pace,
                        const MultiLabelDataset& ds, const GroupPartition& part,
                        const HyperParams& hp) {
    return objective_terms(state, pace, ds, part, hp).total();
}

// Warm start: U, V from the rank-k SVD of the observed label matrix with the
// singular values split evenly between the factors, W from ridge regression
// of V on X, Z_b random Gaussian rows normalized to unit norm.
inline ModelState initialize(const MultiLabelDataset& ds, const HyperParams& hp,
                             std::uint64_t seed) {
    hp.validate();
    const std::size_t l = ds.num_labels();
    const std::size_t n = ds.num_instances();
    const std::size_t d = ds.dim();
    if (hp.k > std::min(l, n))
        throw ConfigError("initialize: k exceeds the rank available from the label matrix");

    Matrix observed = hadamard(ds.labels, ds.mask);
    TruncatedSvd svd = truncated_svd(observed, hp.k);

    ModelState state;
    state.U = Matrix(l, hp.k);
    state.V = Matrix(hp.k, n);
    for (std::size_t j = 0; j < hp.k; ++j) {
        const double root = std::sqrt(svd.sigma[j]);
        for (std::size_t i = 0; i < l; ++i) state.U(i, j) = svd.u(i, j) * root;
        for (std::size_t c = 0; c < n; ++c) state.V(j, c) = root * svd.vt(j, c);
    }

    // (X X^T + tau I) W = X V^T; a floor on the ridge keeps the solve well
    // posed when tau is 0.
    Matrix gram = matmul_nt(ds.features, ds.features);
    const double ridge = std::max(hp.tau, 1e-10);
    for (std::size_t i = 0; i < d; ++i) gram(i, i) += ridge;
    state.W = solve_spd(gram, matmul_nt(ds.features, state.V));

    Rng rng(seed);
    state.Z.reserve(hp.g);
    for (std::size_t b = 0; b < hp.g; ++b) {
        Matrix z(l, hp.m);
        for (double& v : z.raw()) v = rng.normal();
        for (std::size_t r = 0; r < l; ++r) {
            double norm2 = 0.0;
            for (std::size_t c = 0; c < hp.m; ++c) norm2 += z(r, c) * z(r, c);
            if (norm2 == 0.0) {
                z(r, 0) = 1.0;
            } else {
                const double inv = 1.0 / std::sqrt(norm2);
                for (std::size_t c = 0; c < hp.m; ++c) z(r, c) *= inv;
            }
        }
        state.Z.push_back(std::move(z));
    }
    return state;
}

}  // namespace spmld
