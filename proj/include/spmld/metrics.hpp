#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "spmld/errors.hpp"
#include "spmld/matrix.hpp"

namespace spmld {

// The seven evaluation metrics, all over l x n score/prediction/truth
// matrices with +1 as the positive class. Tied scores count 0.5 in the
// pairwise metrics, which makes per-instance AUC and the per-instance
// ranking-loss contribution sum to exactly 1. Instances or labels missing
// one of the two classes are skipped and counted, not scored.

inline const std::vector<std::string>& metric_names() {
    static const std::vector<std::string> names = {
        "ranking_loss", "coverage", "avg_auc", "instance_auc",
        "macro_f1",     "micro_f1", "instance_f1"};
    return names;
}

inline bool metric_is_minimized(const std::string& name) {
    return name == "ranking_loss" || name == "coverage";
}

namespace detail {

// Ascending average ranks (1-based); tied values share the mean rank.
inline std::vector<double> ascending_ranks(const std::vector<double>& values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        const double avg = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = avg;
        i = j + 1;
    }
    return ranks;
}

// (#correctly ordered (pos, neg) pairs + 0.5 ties) / (#pos #neg) via the
// rank-sum identity; the numerator is a half-integer, so the value is exact.
inline bool auc_of(const std::vector<double>& scores, const std::vector<double>& truth,
                   double& out) {
    std::size_t npos = 0;
    for (double t : truth) npos += t > 0.0 ? 1 : 0;
    const std::size_t nneg = truth.size() - npos;
    if (npos == 0 || nneg == 0) return false;
    const std::vector<double> ranks = ascending_ranks(scores);
    double rank_sum = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i)
        if (truth[i] > 0.0) rank_sum += ranks[i];
    const double np = static_cast<double>(npos);
    out = (rank_sum - np * (np + 1.0) / 2.0) / (np * static_cast<double>(nneg));
    return true;
}

inline void check_shapes(const Matrix& a, const Matrix& b, const char* what) {
    if (!a.same_shape(b)) throw ShapeError(std::string(what) + ": shape mismatch");
}

}  // namespace detail

// Mean over instances of the fraction of (relevant, irrelevant) label pairs
// ranked in the wrong order. Computed from descending rank sums rather than
// pair counting, so the score-sorted route and the enumeration route check
// each other in the tests.
inline double ranking_loss(const Matrix& scores, const Matrix& truth,
                           std::size_t* skipped = nullptr) {
    detail::check_shapes(scores, truth, "ranking_loss");
    const std::size_t l = scores.rows();
    const std::size_t n = scores.cols();
    double sum = 0.0;
    std::size_t evaluated = 0;
    std::size_t skips = 0;
    std::vector<double> col_scores(l);
    for (std::size_t j = 0; j < n; ++j) {
        std::size_t nrel = 0;
        for (std::size_t i = 0; i < l; ++i) {
            col_scores[i] = scores(i, j);
            nrel += truth(i, j) > 0.0 ? 1 : 0;
        }
        const std::size_t nirr = l - nrel;
        if (nrel == 0 || nirr == 0) {
            ++skips;
            continue;
        }
        const std::vector<double> asc = detail::ascending_ranks(col_scores);
        double desc_rank_sum = 0.0;
        for (std::size_t i = 0; i < l; ++i)
            if (truth(i, j) > 0.0) desc_rank_sum += static_cast<double>(l + 1) - asc[i];
        const double nr = static_cast<double>(nrel);
        const double violations = desc_rank_sum - nr * (nr + 1.0) / 2.0;
        sum += violations / (nr * static_cast<double>(nirr));
        ++evaluated;
    }
    if (skipped != nullptr) *skipped = skips;
    if (evaluated == 0)
        throw UndefinedMetricError("ranking_loss: no instance has both label classes");
    return sum / static_cast<double>(evaluated);
}

// Mean over instances of the depth (0-based) needed to cover every relevant
// label; tied irrelevant labels are placed above, the worst case.
inline double coverage(const Matrix& scores, const Matrix& truth,
                       std::size_t* skipped = nullptr) {
    detail::check_shapes(scores, truth, "coverage");
    const std::size_t l = scores.rows();
    const std::size_t n = scores.cols();
    double sum = 0.0;
    std::size_t evaluated = 0;
    std::size_t skips = 0;
    for (std::size_t j = 0; j < n; ++j) {
        bool any_rel = false;
        double lowest_rel = 0.0;
        for (std::size_t i = 0; i < l; ++i) {
            if (truth(i, j) > 0.0 && (!any_rel || scores(i, j) < lowest_rel)) {
                any_rel = true;
                lowest_rel = scores(i, j);
            }
        }
        if (!any_rel) {
            ++skips;
            continue;
        }
        std::size_t depth = 0;
        for (std::size_t i = 0; i < l; ++i) depth += scores(i, j) >= lowest_rel ? 1 : 0;
        sum += static_cast<double>(depth - 1);
        ++evaluated;
    }
    if (skipped != nullptr) *skipped = skips;
    if (evaluated == 0) throw UndefinedMetricError("coverage: no instance has a relevant label");
    return sum / static_cast<double>(evaluated);
}

// Per-label AUC averaged over labels that have both classes.
inline double avg_auc(const Matrix& scores, const Matrix& truth,
                      std::size_t* skipped = nullptr) {
    detail::check_shapes(scores, truth, "avg_auc");
    const std::size_t l = scores.rows();
    const std::size_t n = scores.cols();
    double sum = 0.0;
    std::size_t evaluated = 0;
    std::size_t skips = 0;
    std::vector<double> row_scores(n);
    std::vector<double> row_truth(n);
    for (std::size_t i = 0; i < l; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            row_scores[j] = scores(i, j);
            row_truth[j] = truth(i, j);
        }
        double auc = 0.0;
        if (detail::auc_of(row_scores, row_truth, auc)) {
            sum += auc;
            ++evaluated;
        } else {
            ++skips;
        }
    }
    if (skipped != nullptr) *skipped = skips;
    if (evaluated == 0) throw UndefinedMetricError("avg_auc: no label has both classes");
    return sum / static_cast<double>(evaluated);
}

// Per-instance AUC averaged over instances that have both classes.
inline double instance_auc(const Matrix& scores, const Matrix& truth,
                           std::size_t* skipped = nullptr) {
    detail::check_shapes(scores, truth, "instance_auc");
    const std::size_t l = scores.rows();
    const std::size_t n = scores.cols();
    double sum = 0.0;
    std::size_t evaluated = 0;
    std::size_t skips = 0;
    std::vector<double> col_scores(l);
    std::vector<double> col_truth(l);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < l; ++i) {
            col_scores[i] = scores(i, j);
            col_truth[i] = truth(i, j);
        }
        double auc = 0.0;
        if (detail::auc_of(col_scores, col_truth, auc)) {
            sum += auc;
            ++evaluated;
        } else {
            ++skips;
        }
    }
    if (skipped != nullptr) *skipped = skips;
    if (evaluated == 0)
        throw UndefinedMetricError("instance_auc: no instance has both classes");
    return sum / static_cast<double>(evaluated);
}

namespace detail {

struct F1Counts {
    double tp = 0.0;
    double fp = 0.0;
    double fn = 0.0;

    // 0/0 counts as perfect: nothing to find, nothing found.
    double f1() const {
        const double denom = 2.0 * tp + fp + fn;
        return denom == 0.0 ? 1.0 : 2.0 * tp / denom;
    }
};

inline void tally(F1Counts& c, double pred, double truth) {
    if (pred > 0.0 && truth > 0.0) c.tp += 1.0;
    else if (pred > 0.0) c.fp += 1.0;
    else if (truth > 0.0) c.fn += 1.0;
}

}  // namespace detail

// Per-label F1 averaged over labels; vacuous labels (no positives predicted
// or true) score 1 and are counted separately.
inline double macro_f1(const Matrix& pred, const Matrix& truth,
                       std::size_t* vacuous_labels = nullptr) {
    detail::check_shapes(pred, truth, "macro_f1");
    double sum = 0.0;
    std::size_t vacuous = 0;
    for (std::size_t i = 0; i < pred.rows(); ++i) {
        detail::F1Counts c;
        for (std::size_t j = 0; j < pred.cols(); ++j) detail::tally(c, pred(i, j), truth(i, j));
        if (c.tp == 0.0 && c.fp == 0.0 && c.fn == 0.0) ++vacuous;
        sum += c.f1();
    }
    if (vacuous_labels != nullptr) *vacuous_labels = vacuous;
    return sum / static_cast<double>(pred.rows());
}

inline double micro_f1(const Matrix& pred, const Matrix& truth) {
    detail::check_shapes(pred, truth, "micro_f1");
    detail::F1Counts c;
    for (std::size_t i = 0; i < pred.raw().size(); ++i)
        detail::tally(c, pred.raw()[i], truth.raw()[i]);
    return c.f1();
}

inline double instance_f1(const Matrix& pred, const Matrix& truth) {
    detail::check_shapes(pred, truth, "instance_f1");
    double sum = 0.0;
    for (std::size_t j = 0; j < pred.cols(); ++j) {
        detail::F1Counts c;
        for (std::size_t i = 0; i < pred.rows(); ++i) detail::tally(c, pred(i, j), truth(i, j));
        sum += c.f1();
    }
    return sum / static_cast<double>(pred.cols());
}

// ---------------------------------------------------------------------------
// Paired two-sided Student t-test. "a_better" means the a values are
// statistically larger; callers orient minimized metrics before testing.

enum class TestVerdict { a_better, b_better, no_difference };

inline const char* verdict_name(TestVerdict v) {
    switch (v) {
        case TestVerdict::a_better: return "a_better";
        case TestVerdict::b_better: return "b_better";
        case TestVerdict::no_difference: return "no_difference";
    }
    return "?";
}

struct PairedTTest {
    double t = 0.0;
    double p = 1.0;
    TestVerdict verdict = TestVerdict::no_difference;
};

namespace detail {

// Continued fraction for the regularized incomplete beta (Lentz).
inline double beta_cf(double a, double b, double x) {
    const double tiny = 1e-300;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 300; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-15) break;
    }
    return h;
}

inline double reg_inc_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front =
        std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
        b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(a, b, x) / a;
    return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

}  // namespace detail

// Two-sided p-value for |T_nu| >= |t|.
inline double student_t_two_sided_p(double t, double nu) {
    if (!std::isfinite(t)) return 0.0;
    return detail::reg_inc_beta(nu / 2.0, 0.5, nu / (nu + t * t));
}

inline PairedTTest paired_t_test(const std::vector<double>& a, const std::vector<double>& b,
                                 double alpha = 0.05) {
    if (a.size() != b.size()) throw ShapeError("paired_t_test: length mismatch");
    if (a.size() < 2) throw DomainError("paired_t_test: need at least 2 pairs");
    const std::size_t n = a.size();
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += a[i] - b[i];
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dev = (a[i] - b[i]) - mean;
        var += dev * dev;
    }
    var /= static_cast<double>(n - 1);

    PairedTTest out;
    if (var == 0.0) {
        if (mean == 0.0) return out;  // identical sequences
        // Constant nonzero shift: zero variance of differences, treated as
        // conclusive in the direction of the shift.
        out.t = mean > 0.0 ? std::numeric_limits<double>::infinity()
                           : -std::numeric_limits<double>::infinity();
        out.p = 0.0;
        out.verdict = mean > 0.0 ? TestVerdict::a_better : TestVerdict::b_better;
        return out;
    }
    out.t = mean / std::sqrt(var / static_cast<double>(n));
    out.p = student_t_two_sided_p(out.t, static_cast<double>(n - 1));
    if (out.p < alpha)
        out.verdict = mean > 0.0 ? TestVerdict::a_better : TestVerdict::b_better;
    return out;
}

// ---------------------------------------------------------------------------
// Aggregated reports.

struct MetricStat {
    double mean = 0.0;
    double stddev = 0.0;
    std::vector<double> per_seed;
};

struct MetricsReport {
    std::map<std::string, MetricStat> values;
    std::map<std::string, std::size_t> skip_counts;
    std::size_t label_count = 0;  // carried for coverage normalization at plot time
};

// Sample mean and (n-1) standard deviation per metric; a single report
// aggregates to std 0.
inline MetricsReport aggregate(const std::vector<MetricsReport>& reports) {
    if (reports.empty()) throw DomainError("aggregate: need at least one report");
    MetricsReport out;
    out.label_count = reports.front().label_count;
    for (const auto& [name, stat] : reports.front().values) {
        (void)stat;
        MetricStat agg;
        for (const MetricsReport& rep : reports) {
            auto it = rep.values.find(name);
            if (it == rep.values.end())
                throw ShapeError("aggregate: reports disagree on metric keys");
            for (double v : it->second.per_seed) agg.per_seed.push_back(v);
        }
        const double count = static_cast<double>(agg.per_seed.size());
        for (double v : agg.per_seed) agg.mean += v;
        agg.mean /= count;
        if (agg.per_seed.size() > 1) {
            double var = 0.0;
            for (double v : agg.per_seed) var += (v - agg.mean) * (v - agg.mean);
            agg.stddev = std::sqrt(var / (count - 1.0));
        }
        out.values[name] = std::move(agg);
    }
    for (const MetricsReport& rep : reports) {
        if (rep.values.size() != out.values.size())
            throw ShapeError("aggregate: reports disagree on metric keys");
        for (const auto& [name, cnt] : rep.skip_counts) out.skip_counts[name] += cnt;
    }
    return out;
}

// All seven metrics for one scores/truth pair.
inline MetricsReport evaluate_metrics(const Matrix& scores, const Matrix& truth,
                                      std::size_t label_count) {
    MetricsReport rep;
    rep.label_count = label_count;
    const Matrix pred = [&] {
        Matrix p = scores;
        for (double& v : p.raw()) v = v < 0.0 ? -1.0 : 1.0;
        return p;
    }();

    std::size_t skip = 0;
    auto put = [&rep](const std::string& name, double value) {
        MetricStat stat;
        stat.mean = value;
        stat.stddev = 0.0;
        stat.per_seed = {value};
        rep.values[name] = std::move(stat);
    };

    put("ranking_loss", ranking_loss(scores, truth, &skip));
    rep.skip_counts["ranking_loss_instances"] = skip;
    put("coverage", coverage(scores, truth, &skip));
    rep.skip_counts["coverage_instances"] = skip;
    put("avg_auc", avg_auc(scores, truth, &skip));
    rep.skip_counts["avg_auc_labels"] = skip;
    put("instance_auc", instance_auc(scores, truth, &skip));
    rep.skip_counts["instance_auc_instances"] = skip;
    put("macro_f1", macro_f1(pred, truth, &skip));
    rep.skip_counts["macro_f1_vacuous_labels"] = skip;
    put("micro_f1", micro_f1(pred, truth));
    put("instance_f1", instance_f1(pred, truth));
    return rep;
}

}  // namespace spmld
