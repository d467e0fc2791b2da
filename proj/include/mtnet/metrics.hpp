#pragma once

#include <vector>

namespace mtnet {

struct EvalResult {
    double auc_roc = 0.0;
    double auc_pr = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f_score = 0.0;
    double threshold = 0.5;
    int n_pos = 0;
    int n_neg = 0;
};

// Probability a random positive outranks a random negative, ties at 0.5.
// Computed from midranks; equals the pairwise count exactly.
double auc_roc(const std::vector<double>& scores, const std::vector<int>& labels);

// Brute-force O(n^2) reference of the same statistic.
double auc_roc_pairwise(const std::vector<double>& scores, const std::vector<int>& labels);

// Average precision: step-wise area under the precision-recall curve with
// tied scores grouped into a single step.
double auc_pr(const std::vector<double>& scores, const std::vector<int>& labels);

struct Prf {
    double precision = 0.0;
    double recall = 0.0;
    double f_score = 0.0;
};

// Thresholded counts at score >= threshold; empty denominators yield 0.
Prf prf_at_threshold(const std::vector<double>& scores, const std::vector<int>& labels,
                     double threshold);

EvalResult evaluate(const std::vector<double>& scores, const std::vector<int>& labels,
                    double threshold = 0.5);

struct MetricSummary {
    double mean = 0.0;
    double stddev = 0.0;  // population
};

struct RunReport {
    std::vector<EvalResult> per_seed;
    MetricSummary auc_roc, auc_pr, precision, recall, f_score;
};

RunReport aggregate_runs(const std::vector<EvalResult>& results);

}  // namespace mtnet
