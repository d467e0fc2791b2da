#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "mtnet/matrix.hpp"
#include "mtnet/rng.hpp"

namespace mtnet {

enum class ColumnKind { numeric, categorical };

struct ColumnSpec {
    std::string name;
    ColumnKind kind = ColumnKind::numeric;
    std::vector<std::string> categories;  // categorical only, order fixes the one-hot layout

    bool operator==(const ColumnSpec&) const = default;
};

struct CohortSchema {
    std::vector<ColumnSpec> columns;
    int waves = 0;

    void validate() const;
    // Width after one-hot expansion: one slot per numeric column, one per category.
    int encoded_dim() const;
    std::vector<std::string> encoded_feature_names() const;

    bool operator==(const CohortSchema&) const = default;
};

// One raw table cell. Exactly one of number/category is meaningful,
// decided by the column's kind; `missing` overrides both.
struct RawCell {
    bool missing = true;
    double number = 0.0;
    std::string category;

    static RawCell num(double v) { return {false, v, {}}; }
    static RawCell cat(std::string v) { return {false, 0.0, std::move(v)}; }
    static RawCell none() { return {}; }

    bool operator==(const RawCell&) const = default;
};

struct RawCohort {
    std::vector<std::string> subject_ids;
    // cells[subject][wave][column]
    std::vector<std::vector<std::vector<RawCell>>> cells;
    std::vector<int> labels;  // one per subject, 0/1

    int n_subjects() const { return static_cast<int>(subject_ids.size()); }
    void validate_against(const CohortSchema& schema) const;

    bool operator==(const RawCohort&) const = default;
};

// Fully numeric cohort: no missing values, one-hot groups expanded.
// data is subject-major, then wave, then feature.
struct EncodedCohort {
    int n = 0;
    int waves = 0;
    int dim = 0;
    std::vector<double> data;  // n * waves * dim
    std::vector<int> labels;
    std::vector<std::string> feature_names;

    double at(int subject, int wave, int feature) const {
        return data[(static_cast<std::size_t>(subject) * waves + wave) * dim + feature];
    }
    double& at(int subject, int wave, int feature) {
        return data[(static_cast<std::size_t>(subject) * waves + wave) * dim + feature];
    }
    Matrix subject_matrix(int subject) const;  // waves x dim
    void validate() const;

    bool operator==(const EncodedCohort&) const = default;
};

// Impute missing cells (numeric: column mean pooled over all waves and
// subjects, or 0 when a column is entirely missing; categorical: column
// mode with ties broken by category order) and one-hot encode.
// drop_high_missing removes columns whose missing fraction exceeds 50%
// before encoding.
EncodedCohort impute_and_encode(const RawCohort& raw, const CohortSchema& schema,
                                bool drop_high_missing = false);

EncodedCohort subset(const EncodedCohort& cohort, const std::vector<int>& indices);
EncodedCohort concat(const EncodedCohort& a, const EncodedCohort& b);
EncodedCohort take_first_waves(const EncodedCohort& cohort, int waves);

struct SplitIndices {
    std::vector<int> train, val, test;
};

// Per-class shuffle then largest-remainder allocation of each class across
// the three splits (positives allocated first, remainder ties resolved in
// train/val/test order). Returned index lists are sorted ascending.
SplitIndices stratified_split(const std::vector<int>& labels,
                              const std::array<double, 3>& ratios, Rng& rng);

struct SynthConfig {
    int n_subjects = 4000;
    int waves = 5;
    int n_numeric = 60;
    int n_categorical = 30;
    int categories_per_column = 3;
    int n_archetypes = 5;
    double positive_rate = 0.06;
    double relevant_fraction = 0.1;  // of raw columns, per archetype
    double trend_strength = 1.0;
    double noise_sigma = 1.0;
    double missing_rate = 0.05;
    std::uint64_t seed = 7;

    void validate() const;
    int n_columns() const { return n_numeric + n_categorical; }
    int relevant_per_archetype() const;
};

struct SynthResult {
    RawCohort cohort;
    CohortSchema schema;
    std::vector<int> archetype;  // per subject; -1 for negatives
    std::vector<std::vector<int>> archetype_columns;  // raw column indices, pairwise disjoint
};

// Longitudinal cohort with planted multi-cause positives. Negatives drift
// mildly (AR(1) on numeric columns, sticky categories); each positive
// follows one archetype whose relevant columns trend away from the base
// distribution, growing toward the later waves. Missing cells are injected
// uniformly. Deterministic in cfg.seed; subjects draw from forked streams.
SynthResult generate_synthetic(const SynthConfig& cfg);

}  // namespace mtnet
