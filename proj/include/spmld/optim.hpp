#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "spmld/dataset.hpp"
#include "spmld/errors.hpp"
#include "spmld/matrix.hpp"
#include "spmld/model.hpp"
#include "spmld/partition.hpp"
#include "spmld/selfpaced.hpp"

namespace spmld {

// Block coordinate descent: projected gradient on each Z_b, then plain
// gradient steps on V, U, W, then the closed-form pace update, then the
// anneal step, cycled until the objective stalls at fixed (lambda, gamma).
//
// All gradients carry their exact constant factors so they match central
// finite differences of the objective; with line search the extra factor of
// two changes nothing about the fixed points.

struct OptimConfig {
    std::size_t max_outer_iters = 100;
    std::size_t inner_steps_per_block = 5;
    double armijo_c = 1e-4;
    double backtrack_ratio = 0.5;
    double rel_tol = 1e-5;
    std::uint64_t seed = 0;

    void validate() const {
        if (inner_steps_per_block < 1)
            throw ConfigError("optim: inner_steps_per_block must be >= 1");
        if (!(armijo_c > 0.0 && armijo_c < 1.0))
            throw ConfigError("optim: armijo_c must lie in (0, 1)");
        if (!(backtrack_ratio > 0.0 && backtrack_ratio < 1.0))
            throw ConfigError("optim: backtrack_ratio must lie in (0, 1)");
        if (!(rel_tol > 0.0)) throw ConfigError("optim: rel_tol must be > 0");
    }
};

enum class FitMode { spmld, glocal };

struct IterationRecord {
    std::size_t iter = 0;
    ObjectiveTerms terms;  // evaluated after the pace update, before anneal
    double lambda = 0.0;
    double gamma = 0.0;
    double mean_pace_weight = 0.0;
    std::size_t accepted_steps = 0;
    // model_part after each block's inner steps: Z_0..Z_{g-1}, V, U, W.
    std::vector<double> block_objectives;
};

struct PaceRowDiag {
    std::size_t iter = 0;
    std::size_t row = 0;
    std::size_t theta1 = 0;
    std::size_t theta2 = 0;
    double nonzero_fraction = 0.0;
};

struct FitTrace {
    std::vector<IterationRecord> records;
    std::vector<PaceRowDiag> pace_rows;  // one entry per latent row per iteration
};

inline Matrix grad_z(const ModelState& state, const MultiLabelDataset& ds,
                     const GroupPartition& part, std::size_t b, const HyperParams& hp) {
    if (b >= part.num_groups()) throw RangeError("grad_z: group index out of range");
    const double weight_b =
        hp.beta1 * static_cast<double>(part.sizes[b]) / static_cast<double>(ds.num_instances());
    Matrix f = matmul(state.U, matmul_tn(state.W, ds.features));
    Matrix grad = matmul(f, matmul_tn(f, state.Z[b]));
    grad *= weight_b;
    if (hp.beta2 != 0.0) {
        Matrix fb = gather_columns(f, group_columns(part, b));
        Matrix local = matmul(fb, matmul_tn(fb, state.Z[b]));
        local *= hp.beta2;
        grad += local;
    }
    grad *= 2.0;
    return grad;
}

inline Matrix grad_v(const ModelState& state, const PaceState& pace,
                     const MultiLabelDataset& ds, const HyperParams& hp) {
    if (state.V.cols() != ds.num_instances()) throw ShapeError("grad_v: n mismatch");
    Matrix resid = matmul(state.U, state.V);
    resid -= ds.labels;
    resid = hadamard(resid, ds.mask);
    Matrix grad = matmul_tn(state.U, resid);

    Matrix wx = matmul_tn(state.W, ds.features);
    for (std::size_t i = 0; i < grad.raw().size(); ++i) {
        grad.raw()[i] += hp.alpha * pace.P.raw()[i] * (state.V.raw()[i] - wx.raw()[i]) +
                         hp.tau * state.V.raw()[i];
    }
    grad *= 2.0;
    return grad;
}

inline Matrix grad_u(const ModelState& state, const MultiLabelDataset& ds,
                     const GroupPartition& part, const HyperParams& hp) {
    Matrix resid = matmul(state.U, state.V);
    resid -= ds.labels;
    resid = hadamard(resid, ds.mask);
    Matrix grad = matmul_nt(resid, state.V);

    Matrix tauU = state.U;
    tauU *= hp.tau;
    grad += tauU;

    Matrix wx = matmul_tn(state.W, ds.features);  // k x n
    Matrix wxxw = matmul_nt(wx, wx);              // k x k
    const double n = static_cast<double>(ds.num_instances());
    for (std::size_t b = 0; b < part.num_groups(); ++b) {
        Matrix wxb = gather_columns(wx, group_columns(part, b));
        Matrix inner = wxxw;
        inner *= hp.beta1 * static_cast<double>(part.sizes[b]) / n;
        Matrix local = matmul_nt(wxb, wxb);
        local *= hp.beta2;
        inner += local;
        grad += matmul(state.Z[b], matmul(matmul_tn(state.Z[b], state.U), inner));
    }
    grad *= 2.0;
    return grad;
}

inline Matrix grad_w(const ModelState& state, const PaceState& pace,
                     const MultiLabelDataset& ds, const GroupPartition& part,
                     const HyperParams& hp) {
    Matrix wx = matmul_tn(state.W, ds.features);  // k x n
    Matrix resid = wx;
    resid -= state.V;
    resid = hadamard(resid, pace.P);
    Matrix grad = matmul_nt(ds.features, resid);  // d x k
    grad *= hp.alpha;

    Matrix tauW = state.W;
    tauW *= hp.tau;
    grad += tauW;

    const double n = static_cast<double>(ds.num_instances());
    for (std::size_t b = 0; b < part.num_groups(); ++b) {
        Matrix zu = matmul_tn(state.Z[b], state.U);  // m x k
        Matrix wm = matmul(state.W, matmul_tn(zu, zu));
        Matrix global = matmul(ds.features, matmul_tn(ds.features, wm));
        global *= hp.beta1 * static_cast<double>(part.sizes[b]) / n;
        grad += global;
        if (hp.beta2 != 0.0) {
            Matrix xb = gather_columns(ds.features, group_columns(part, b));
            Matrix local = matmul(xb, matmul_tn(xb, wm));
            local *= hp.beta2;
            grad += local;
        }
    }
    grad *= 2.0;
    return grad;
}

// Row-wise projection onto the unit sphere; a zero row becomes e_1.
inline Matrix project_unit_rows(Matrix z) {
    for (std::size_t r = 0; r < z.rows(); ++r) {
        double norm2 = 0.0;
        for (std::size_t c = 0; c < z.cols(); ++c) norm2 += z(r, c) * z(r, c);
        if (norm2 == 0.0) {
            z(r, 0) = 1.0;
        } else {
            const double inv = 1.0 / std::sqrt(norm2);
            for (std::size_t c = 0; c < z.cols(); ++c) z(r, c) *= inv;
        }
    }
    return z;
}

enum class Block { Z, V, U, W };

inline const char* block_name(Block block) {
    switch (block) {
        case Block::Z: return "Z";
        case Block::V: return "V";
        case Block::U: return "U";
        case Block::W: return "W";
    }
    return "?";
}

// One backtracking step on the named block. Starts at step 1 and shrinks by
// backtrack_ratio until the Armijo decrease test holds; Z trials are
// projected back to unit rows before evaluation. Returns the accepted step,
// or 0 with the state untouched when nothing down to 1e-12 passes.
inline double line_search_step(Block block, std::size_t b, ModelState& state,
                               const PaceState& pace, const MultiLabelDataset& ds,
                               const GroupPartition& part, const HyperParams& hp,
                               const OptimConfig& cfg) {
    Matrix grad;
    switch (block) {
        case Block::Z: grad = grad_z(state, ds, part, b, hp); break;
        case Block::V: grad = grad_v(state, pace, ds, hp); break;
        case Block::U: grad = grad_u(state, ds, part, hp); break;
        case Block::W: grad = grad_w(state, pace, ds, part, hp); break;
    }
    if (!grad.all_finite())
        throw NumericalError(std::string("line search: non-finite gradient in block ") +
                             block_name(block));
    const double grad_norm2 = grad.frob2();
    if (grad_norm2 == 0.0) return 1.0;

    const double f_old = objective_terms(state, pace, ds, part, hp).model_part();
    if (!std::isfinite(f_old))
        throw NumericalError(std::string("line search: non-finite objective in block ") +
                             block_name(block));

    const Matrix* current = nullptr;
    switch (block) {
        case Block::Z: current = &state.Z[b]; break;
        case Block::V: current = &state.V; break;
        case Block::U: current = &state.U; break;
        case Block::W: current = &state.W; break;
    }

    for (double step = 1.0; step >= 1e-12; step *= cfg.backtrack_ratio) {
        Matrix trial = *current;
        for (std::size_t i = 0; i < trial.raw().size(); ++i)
            trial.raw()[i] -= step * grad.raw()[i];
        if (block == Block::Z) trial = project_unit_rows(std::move(trial));

        ModelState probe = state;
        switch (block) {
            case Block::Z: probe.Z[b] = std::move(trial); break;
            case Block::V: probe.V = std::move(trial); break;
            case Block::U: probe.U = std::move(trial); break;
            case Block::W: probe.W = std::move(trial); break;
        }
        const double f_new = objective_terms(probe, pace, ds, part, hp).model_part();
        if (std::isfinite(f_new) && f_old - f_new >= cfg.armijo_c * step * grad_norm2) {
            state = std::move(probe);
            return step;
        }
    }
    return 0.0;
}

struct FitResult {
    ModelState state;
    PaceState pace;
    FitTrace trace;
};

inline FitResult fit(const MultiLabelDataset& ds, const GroupPartition& part,
                     const HyperParams& hp, const PaceState& pace0, const OptimConfig& cfg,
                     const ModelState& initial, FitMode mode = FitMode::spmld) {
    cfg.validate();
    if (mode == FitMode::spmld) pace0.validate();

    FitResult result;
    result.state = initial;
    result.pace = pace0;

    for (std::size_t iter = 0; iter < cfg.max_outer_iters; ++iter) {
        const ObjectiveTerms start_terms =
            objective_terms(result.state, result.pace, ds, part, hp);

        IterationRecord rec;
        rec.iter = iter;

        auto run_block = [&](Block block, std::size_t b) {
            for (std::size_t s = 0; s < cfg.inner_steps_per_block; ++s) {
                double step = 0.0;
                try {
                    step = line_search_step(block, b, result.state, result.pace, ds, part,
                                            hp, cfg);
                } catch (const NumericalError& e) {
                    throw NumericalError("outer iteration " + std::to_string(iter) + ": " +
                                         e.what());
                }
                if (step > 0.0) ++rec.accepted_steps;
            }
            rec.block_objectives.push_back(
                objective_terms(result.state, result.pace, ds, part, hp).model_part());
        };

        for (std::size_t b = 0; b < part.num_groups(); ++b) run_block(Block::Z, b);
        run_block(Block::V, 0);
        run_block(Block::U, 0);
        run_block(Block::W, 0);

        if (mode == FitMode::spmld) {
            Matrix losses = residual_loss(result.state, ds, hp);
            std::vector<RowSolution> rows;
            result.pace = update_pace(result.pace, losses, &rows);
            for (std::size_t i = 0; i < rows.size(); ++i) {
                std::size_t nonzero = 0;
                for (double w : rows[i].weights) nonzero += w > 0.0 ? 1 : 0;
                result.trace.pace_rows.push_back(
                    {iter, i, rows[i].theta1, rows[i].theta2,
                     static_cast<double>(nonzero) /
                         static_cast<double>(std::max<std::size_t>(rows[i].weights.size(), 1))});
            }
        }

        rec.terms = objective_terms(result.state, result.pace, ds, part, hp);
        rec.lambda = result.pace.lambda;
        rec.gamma = result.pace.gamma;
        double mean_p = 0.0;
        for (double p : result.pace.P.raw()) mean_p += p;
        rec.mean_pace_weight = mean_p / static_cast<double>(result.pace.P.size());
        result.trace.records.push_back(std::move(rec));

        // Change across the iteration at fixed (lambda, gamma), accumulated
        // per term group so a large constant pace term cannot absorb a small
        // model-term change.
        const ObjectiveTerms& end_terms = result.trace.records.back().terms;
        const double delta = (end_terms.model_part() - start_terms.model_part()) +
                             ((end_terms.pace_l1 + end_terms.pace_l2) -
                              (start_terms.pace_l1 + start_terms.pace_l2));
        const bool converged =
            std::abs(delta) < cfg.rel_tol * std::max(std::abs(start_terms.total()), 1e-12);

        if (mode == FitMode::spmld) result.pace = anneal(result.pace);
        if (converged) break;
    }
    return result;
}

inline FitResult fit(const MultiLabelDataset& ds, const GroupPartition& part,
                     const HyperParams& hp, const PaceState& pace0, const OptimConfig& cfg,
                     FitMode mode = FitMode::spmld) {
    return fit(ds, part, hp, pace0, cfg, initialize(ds, hp, cfg.seed), mode);
}

inline void write_pace_diag_csv(std::ostream& os, const FitTrace& trace) {
    os << "iter,row,theta1,theta2,nonzero_fraction\n";
    char buf[128];
    for (const PaceRowDiag& d : trace.pace_rows) {
        std::snprintf(buf, sizeof(buf), "%zu,%zu,%zu,%zu,%.17g\n", d.iter, d.row, d.theta1,
                      d.theta2, d.nonzero_fraction);
        os << buf;
    }
}

inline void write_trace_csv(std::ostream& os, const FitTrace& trace) {
    os << "iter,objective,recon,residual,global_corr,local_corr,pace_l1,pace_l2,reg,"
          "lambda,gamma,mean_p\n";
    char buf[512];
    for (const IterationRecord& rec : trace.records) {
        std::snprintf(buf, sizeof(buf),
                      "%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                      rec.iter, rec.terms.total(), rec.terms.recon, rec.terms.residual,
                      rec.terms.global_corr, rec.terms.local_corr, rec.terms.pace_l1,
                      rec.terms.pace_l2, rec.terms.reg, rec.lambda, rec.gamma,
                      rec.mean_pace_weight);
        os << buf;
    }
}

}  // namespace spmld
