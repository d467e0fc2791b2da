#include "mtnet/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mtnet/errors.hpp"

namespace mtnet {

namespace {

void check_inputs(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size()) {
        throw MetricError("got " + std::to_string(scores.size()) + " scores for " +
                          std::to_string(labels.size()) + " labels");
    }
    if (scores.empty()) throw MetricError("cannot score an empty set");
    for (double s : scores) {
        if (!std::isfinite(s)) throw MetricError("scores contain a non-finite value");
    }
    for (int y : labels) {
        if (y != 0 && y != 1) throw MetricError("label " + std::to_string(y) + " is not binary");
    }
}

std::pair<long, long> class_counts(const std::vector<int>& labels) {
    long pos = 0;
    for (int y : labels) pos += y;
    return {pos, static_cast<long>(labels.size()) - pos};
}

}  // namespace

double auc_roc(const std::vector<double>& scores, const std::vector<int>& labels) {
    check_inputs(scores, labels);
    const auto [n_pos, n_neg] = class_counts(labels);
    if (n_pos == 0 || n_neg == 0) {
        throw MetricError("ranking quality needs both classes, got " + std::to_string(n_pos) +
                          " positives of " + std::to_string(labels.size()));
    }

    std::vector<int> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return scores[a] < scores[b]; });

    // midranks over tied groups; rank sums of half-integers stay exact
    double pos_rank_sum = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
        const double midrank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
        for (std::size_t k = i; k < j; ++k) {
            if (labels[order[k]] == 1) pos_rank_sum += midrank;
        }
        i = j;
    }
    const double u = pos_rank_sum - 0.5 * static_cast<double>(n_pos) *
                                        static_cast<double>(n_pos + 1);
    return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

double auc_roc_pairwise(const std::vector<double>& scores, const std::vector<int>& labels) {
    check_inputs(scores, labels);
    const auto [n_pos, n_neg] = class_counts(labels);
    if (n_pos == 0 || n_neg == 0) {
        throw MetricError("ranking quality needs both classes");
    }
    double wins = 0.0;
    for (std::size_t a = 0; a < scores.size(); ++a) {
        if (labels[a] != 1) continue;
        for (std::size_t b = 0; b < scores.size(); ++b) {
            if (labels[b] != 0) continue;
            if (scores[a] > scores[b]) {
                wins += 1.0;
            } else if (scores[a] == scores[b]) {
                wins += 0.5;
            }
        }
    }
    return wins / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

double auc_pr(const std::vector<double>& scores, const std::vector<int>& labels) {
    check_inputs(scores, labels);
    const auto [n_pos, n_neg] = class_counts(labels);
    (void)n_neg;
    if (n_pos == 0) throw MetricError("average precision needs at least one positive");

    std::vector<int> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return scores[a] > scores[b]; });

    double ap = 0.0;
    long tp = 0, seen = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        long group_tp = 0;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) {
            group_tp += labels[order[j]];
            ++j;
        }
        tp += group_tp;
        seen += static_cast<long>(j - i);
        if (group_tp > 0) {
            const double precision = static_cast<double>(tp) / static_cast<double>(seen);
            const double delta_recall =
                static_cast<double>(group_tp) / static_cast<double>(n_pos);
            ap += precision * delta_recall;
        }
        i = j;
    }
    return ap;
}

Prf prf_at_threshold(const std::vector<double>& scores, const std::vector<int>& labels,
                     double threshold) {
    check_inputs(scores, labels);
    long tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const bool predicted = scores[i] >= threshold;
        if (predicted && labels[i] == 1) {
            ++tp;
        } else if (predicted) {
            ++fp;
        } else if (labels[i] == 1) {
            ++fn;
        }
    }
    Prf out;
    out.precision = (tp + fp > 0) ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    out.recall = (tp + fn > 0) ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
    out.f_score = (out.precision + out.recall > 0.0)
                      ? 2.0 * out.precision * out.recall / (out.precision + out.recall)
                      : 0.0;
    return out;
}

EvalResult evaluate(const std::vector<double>& scores, const std::vector<int>& labels,
                    double threshold) {
    EvalResult result;
    result.auc_roc = auc_roc(scores, labels);
    result.auc_pr = auc_pr(scores, labels);
    const Prf prf = prf_at_threshold(scores, labels, threshold);
    result.precision = prf.precision;
    result.recall = prf.recall;
    result.f_score = prf.f_score;
    result.threshold = threshold;
    const auto [n_pos, n_neg] = class_counts(labels);
    result.n_pos = static_cast<int>(n_pos);
    result.n_neg = static_cast<int>(n_neg);
    return result;
}

RunReport aggregate_runs(const std::vector<EvalResult>& results) {
    if (results.empty()) throw MetricError("cannot aggregate zero runs");
    RunReport report;
    report.per_seed = results;
    const double n = static_cast<double>(results.size());
    auto summarize = [&](double EvalResult::*field) {
        MetricSummary s;
        for (const auto& r : results) s.mean += r.*field;
        s.mean /= n;
        double var = 0.0;
        for (const auto& r : results) {
            const double d = r.*field - s.mean;
            var += d * d;
        }
        s.stddev = std::sqrt(var / n);
        return s;
    };
    report.auc_roc = summarize(&EvalResult::auc_roc);
    report.auc_pr = summarize(&EvalResult::auc_pr);
    report.precision = summarize(&EvalResult::precision);
    report.recall = summarize(&EvalResult::recall);
    report.f_score = summarize(&EvalResult::f_score);
    return report;
}

}  // namespace mtnet
