#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "spmld/errors.hpp"
#include "spmld/matrix.hpp"
#include "spmld/model.hpp"

namespace spmld {

// Closed-form solver for the per-row pace subproblem
//
//   min_{p in [0,1]^n}  sum_j p_j loss_j - lambda sum_j p_j + gamma ||p||_2
//
// The objective is convex (linear plus a norm), and its KKT points have the
// shape p_j = clamp(c (lambda - loss_j), 0, 1) in ascending-loss order: a
// prefix of ones, a fractional middle, and zeros from the first loss >= lambda
// on. solve_row enumerates the ones-count theta1, forms each candidate with
// its self-consistent scale c, and keeps the candidate with the smallest
// objective value, which recovers the exact minimizer. gamma = 0 degenerates
// to the hard threshold rule p_j = 1 iff loss_j < lambda.

struct RowSolveInputs {
    std::vector<double> losses;
    double lambda = 0.0;
    double gamma = 0.0;
};

struct RowSolution {
    std::vector<double> weights;  // original order, entries in [0, 1]
    std::size_t theta1 = 0;       // 1-based sorted position: ones at j <= theta1
    std::size_t theta2 = 0;       // 1-based sorted position: zeros at j >= theta2
    double scale = 0.0;           // c* of the winning candidate
    double objective_value = 0.0;
};

inline double pace_row_objective(const std::vector<double>& weights,
                                 const RowSolveInputs& inp) {
    double linear = 0.0;
    double norm2 = 0.0;
    for (std::size_t j = 0; j < weights.size(); ++j) {
        linear += weights[j] * (inp.losses[j] - inp.lambda);
        norm2 += weights[j] * weights[j];
    }
    return linear + inp.gamma * std::sqrt(norm2);
}

inline RowSolution solve_row(const RowSolveInputs& inp) {
    if (!(inp.lambda > 0.0)) throw DomainError("solve_row: lambda must be > 0");
    if (inp.gamma < 0.0) throw DomainError("solve_row: gamma must be >= 0");
    for (double loss : inp.losses)
        if (!std::isfinite(loss) || loss < 0.0)
            throw DomainError("solve_row: losses must be finite and >= 0");

    const std::size_t n = inp.losses.size();
    RowSolution out;
    out.weights.assign(n, 0.0);
    if (n == 0) {
        out.theta2 = 1;
        return out;
    }

    // Stable ascending sort; ties keep original order so reruns agree.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return inp.losses[a] < inp.losses[b];
    });
    std::vector<double> sorted(n);
    for (std::size_t j = 0; j < n; ++j) sorted[j] = inp.losses[order[j]];

    // theta2 = G*: first sorted position (1-based) with loss >= lambda.
    std::size_t theta2 = n + 1;
    for (std::size_t j = 0; j < n; ++j) {
        if (sorted[j] >= inp.lambda) {
            theta2 = j + 1;
            break;
        }
    }
    // H*: last sorted position (1-based) with loss <= lambda - gamma.
    std::size_t h_star = 0;
    for (std::size_t j = n; j-- > 0;) {
        if (sorted[j] <= inp.lambda - inp.gamma) {
            h_star = j + 1;
            break;
        }
    }
    // H* can land past theta2 only via exact loss == lambda ties at gamma = 0,
    // where the threshold rule assigns 0; cap the range accordingly.
    const std::size_t lo = std::min(h_star, theta2 - 1);

    std::vector<double> candidate(n);
    std::vector<double> best(n, 0.0);
    double best_value = 0.0;
    bool have_best = false;
    std::size_t best_theta1 = 0;
    double best_scale = 0.0;

    RowSolveInputs sorted_inp{sorted, inp.lambda, inp.gamma};
    for (std::size_t theta1 = lo; theta1 < theta2; ++theta1) {
        double r = 0.0;
        double s = 0.0;
        for (std::size_t j = theta1; j + 1 < theta2; ++j) {
            const double gap = inp.lambda - sorted[j];
            r += gap * gap;
            s += gap;
        }
        const double gamma2 = inp.gamma * inp.gamma;
        double c = 0.0;
        if (theta1 + 1 < theta2) {  // nonempty middle
            if (gamma2 > r) {
                c = std::sqrt(static_cast<double>(theta1) / (gamma2 - r));
            } else {
                // The sqrt branch has no real solution here; fall back to the
                // boundary value of the case table and let the objective
                // comparison below sort the candidates out.
                c = gamma2 < s ? inp.lambda - sorted[theta1] : 0.0;
            }
        }

        for (std::size_t j = 0; j < n; ++j) {
            if (j < theta1) {
                candidate[j] = 1.0;
            } else if (j + 1 >= theta2) {
                candidate[j] = 0.0;
            } else {
                candidate[j] = std::clamp(c * (inp.lambda - sorted[j]), 0.0, 1.0);
            }
        }
        const double value = pace_row_objective(candidate, sorted_inp);
        if (!have_best || value < best_value) {
            have_best = true;
            best_value = value;
            best = candidate;
            best_theta1 = theta1;
            best_scale = c;
        }
    }

    for (std::size_t j = 0; j < n; ++j) out.weights[order[j]] = best[j];
    out.theta1 = best_theta1;
    out.theta2 = theta2;
    out.scale = best_scale;
    out.objective_value = best_value;
    return out;
}

// Brute-force verifier for solve_row: dense grid over [0,1]^n followed by a
// projected-gradient polish from the best grid point. Exercised by the tests;
// deliberately ignorant of the closed form above.
inline std::vector<double> oracle_minimize_row(const RowSolveInputs& inp,
                                               int grid_steps = 9) {
    const std::size_t n = inp.losses.size();
    if (n > 8) throw ConfigError("oracle_minimize_row: exhaustive mode supports n <= 8");
    if (grid_steps < 2) throw ConfigError("oracle_minimize_row: need at least 2 grid steps");

    std::vector<double> best(n, 0.0);
    std::vector<double> point(n, 0.0);
    double best_value = pace_row_objective(best, inp);

    std::vector<int> ticks(n, 0);
    const auto steps = static_cast<std::size_t>(grid_steps);
    std::size_t total = 1;
    for (std::size_t j = 0; j < n; ++j) total *= steps;
    for (std::size_t cell = 1; cell < total; ++cell) {
        std::size_t rest = cell;
        for (std::size_t j = 0; j < n; ++j) {
            ticks[j] = static_cast<int>(rest % steps);
            rest /= steps;
            point[j] = static_cast<double>(ticks[j]) / static_cast<double>(grid_steps - 1);
        }
        const double value = pace_row_objective(point, inp);
        if (value < best_value) {
            best_value = value;
            best = point;
        }
    }

    // Projected gradient with backtracking. Near p = 0 the norm is not
    // differentiable, so the subgradient uses the descent direction there.
    std::vector<double> grad(n);
    std::vector<double> trial(n);
    double step = 1.0;
    for (int iter = 0; iter < 4000; ++iter) {
        double norm = 0.0;
        for (double p : best) norm += p * p;
        norm = std::sqrt(norm);
        for (std::size_t j = 0; j < n; ++j) {
            const double base = inp.losses[j] - inp.lambda;
            grad[j] = norm > 0.0 ? base + inp.gamma * best[j] / norm : base + inp.gamma;
        }
        bool moved = false;
        double local = step;
        for (int halving = 0; halving < 60; ++halving) {
            for (std::size_t j = 0; j < n; ++j)
                trial[j] = std::clamp(best[j] - local * grad[j], 0.0, 1.0);
            const double value = pace_row_objective(trial, inp);
            if (value < best_value - 1e-18) {
                best_value = value;
                best = trial;
                step = local * 2.0;
                moved = true;
                break;
            }
            local *= 0.5;
        }
        if (!moved) break;
    }
    return best;
}

// Replaces every row of P by the solve_row answer on the matching loss row.
// lambda and gamma are untouched; anneal() moves them. Per-row solutions can
// be collected for the diagnostic dump.
inline PaceState update_pace(const PaceState& pace, const Matrix& losses,
                             std::vector<RowSolution>* row_solutions = nullptr) {
    if (!pace.P.same_shape(losses))
        throw ShapeError("update_pace: loss matrix must match P");
    PaceState out = pace;
    RowSolveInputs row;
    row.lambda = pace.lambda;
    row.gamma = pace.gamma;
    row.losses.resize(losses.cols());
    if (row_solutions != nullptr) row_solutions->clear();
    for (std::size_t i = 0; i < losses.rows(); ++i) {
        for (std::size_t j = 0; j < losses.cols(); ++j) row.losses[j] = losses(i, j);
        RowSolution sol = solve_row(row);
        for (std::size_t j = 0; j < losses.cols(); ++j) out.P(i, j) = sol.weights[j];
        if (row_solutions != nullptr) row_solutions->push_back(std::move(sol));
    }
    return out;
}

// Algorithm schedule: the pace threshold grows, the diversity weight decays.
inline PaceState anneal(const PaceState& pace) {
    PaceState out = pace;
    out.lambda = pace.lambda * pace.mu1;
    out.gamma = pace.gamma * pace.mu2;
    return out;
}

}  // namespace spmld
