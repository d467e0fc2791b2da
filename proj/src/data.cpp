#include "mtnet/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "mtnet/errors.hpp"

namespace mtnet {

void CohortSchema::validate() const {
    if (waves < 1) throw SchemaError("schema needs at least one wave");
    if (columns.empty()) throw SchemaError("schema has no columns");
    std::set<std::string> seen;
    for (const auto& col : columns) {
        if (col.name.empty()) throw SchemaError("schema has an unnamed column");
        if (!seen.insert(col.name).second) {
            throw SchemaError("duplicate column name '" + col.name + "'");
        }
        if (col.kind == ColumnKind::categorical) {
            if (col.categories.size() < 2) {
                throw SchemaError("categorical column '" + col.name +
                                  "' needs at least 2 categories");
            }
            std::set<std::string> cats(col.categories.begin(), col.categories.end());
            if (cats.size() != col.categories.size()) {
                throw SchemaError("categorical column '" + col.name +
                                  "' lists a category twice");
            }
        } else if (!col.categories.empty()) {
            throw SchemaError("numeric column '" + col.name + "' must not list categories");
        }
    }
}

int CohortSchema::encoded_dim() const {
    int d = 0;
    for (const auto& col : columns) {
        d += (col.kind == ColumnKind::numeric) ? 1 : static_cast<int>(col.categories.size());
    }
    return d;
}

std::vector<std::string> CohortSchema::encoded_feature_names() const {
    std::vector<std::string> names;
    for (const auto& col : columns) {
        if (col.kind == ColumnKind::numeric) {
            names.push_back(col.name);
        } else {
            for (const auto& cat : col.categories) names.push_back(col.name + "=" + cat);
        }
    }
    return names;
}

void RawCohort::validate_against(const CohortSchema& schema) const {
    schema.validate();
    const std::size_t n = subject_ids.size();
    if (cells.size() != n || labels.size() != n) {
        std::ostringstream os;
        os << "cohort arrays disagree: " << n << " ids, " << cells.size() << " cell grids, "
           << labels.size() << " labels";
        throw DataError(os.str());
    }
    for (std::size_t s = 0; s < n; ++s) {
        if (labels[s] != 0 && labels[s] != 1) {
            throw DataError("subject '" + subject_ids[s] + "' has non-binary label " +
                            std::to_string(labels[s]));
        }
        if (static_cast<int>(cells[s].size()) != schema.waves) {
            std::ostringstream os;
            os << "subject '" << subject_ids[s] << "' has " << cells[s].size() << " waves, schema says "
               << schema.waves;
            throw DataError(os.str());
        }
        for (const auto& wave : cells[s]) {
            if (wave.size() != schema.columns.size()) {
                std::ostringstream os;
                os << "subject '" << subject_ids[s] << "' has a wave with " << wave.size()
                   << " cells, schema has " << schema.columns.size() << " columns";
                throw DataError(os.str());
            }
        }
    }
}

Matrix EncodedCohort::subject_matrix(int subject) const {
    Matrix x(waves, dim);
    const double* src = data.data() + static_cast<std::size_t>(subject) * waves * dim;
    std::copy(src, src + static_cast<std::size_t>(waves) * dim, x.data());
    return x;
}

void EncodedCohort::validate() const {
    if (n < 0 || waves < 1 || dim < 1) throw DataError("encoded cohort has degenerate dimensions");
    if (data.size() != static_cast<std::size_t>(n) * waves * dim) {
        std::ostringstream os;
        os << "encoded payload has " << data.size() << " values, expected " << n << "*" << waves
           << "*" << dim;
        throw DataError(os.str());
    }
    if (labels.size() != static_cast<std::size_t>(n)) {
        throw DataError("encoded cohort has " + std::to_string(labels.size()) + " labels for " +
                        std::to_string(n) + " subjects");
    }
    if (feature_names.size() != static_cast<std::size_t>(dim)) {
        throw DataError("encoded cohort names " + std::to_string(feature_names.size()) +
                        " features, dim is " + std::to_string(dim));
    }
    for (int y : labels) {
        if (y != 0 && y != 1) throw DataError("encoded cohort label " + std::to_string(y));
    }
    for (double v : data) {
        if (!std::isfinite(v)) throw DataError("encoded cohort contains a non-finite value");
    }
}

EncodedCohort impute_and_encode(const RawCohort& raw, const CohortSchema& schema,
                                bool drop_high_missing) {
    raw.validate_against(schema);
    const int n = raw.n_subjects();
    const int w = schema.waves;
    const int n_cols = static_cast<int>(schema.columns.size());

    // Column statistics pooled over all waves and subjects.
    std::vector<double> mean(n_cols, 0.0);
    std::vector<int> mode(n_cols, 0);
    std::vector<int> missing_count(n_cols, 0);
    for (int j = 0; j < n_cols; ++j) {
        const auto& col = schema.columns[j];
        if (col.kind == ColumnKind::numeric) {
            double sum = 0.0;
            long count = 0;
            for (int s = 0; s < n; ++s) {
                for (int t = 0; t < w; ++t) {
                    const RawCell& cell = raw.cells[s][t][j];
                    if (cell.missing) {
                        ++missing_count[j];
                        continue;
                    }
                    if (!std::isfinite(cell.number)) {
                        throw DataError("column '" + col.name + "' holds a non-finite value");
                    }
                    sum += cell.number;
                    ++count;
                }
            }
            mean[j] = (count > 0) ? sum / static_cast<double>(count) : 0.0;
        } else {
            std::vector<long> counts(col.categories.size(), 0);
            for (int s = 0; s < n; ++s) {
                for (int t = 0; t < w; ++t) {
                    const RawCell& cell = raw.cells[s][t][j];
                    if (cell.missing) {
                        ++missing_count[j];
                        continue;
                    }
                    auto it = std::find(col.categories.begin(), col.categories.end(),
                                        cell.category);
                    if (it == col.categories.end()) {
                        throw SchemaError("column '" + col.name + "': unknown category '" +
                                          cell.category + "'");
                    }
                    ++counts[it - col.categories.begin()];
                }
            }
            // ties fall to the earlier category
            int best = 0;
            for (std::size_t k = 1; k < counts.size(); ++k) {
                if (counts[k] > counts[best]) best = static_cast<int>(k);
            }
            mode[j] = best;
        }
    }

    std::vector<int> kept;
    const long cells_per_column = static_cast<long>(n) * w;
    for (int j = 0; j < n_cols; ++j) {
        if (drop_high_missing && cells_per_column > 0 &&
            missing_count[j] * 2L > cells_per_column) {
            continue;
        }
        kept.push_back(j);
    }
    if (kept.empty()) throw DataError("every column exceeded the missingness threshold");

    CohortSchema kept_schema;
    kept_schema.waves = w;
    for (int j : kept) kept_schema.columns.push_back(schema.columns[j]);

    EncodedCohort out;
    out.n = n;
    out.waves = w;
    out.dim = kept_schema.encoded_dim();
    out.feature_names = kept_schema.encoded_feature_names();
    out.labels = raw.labels;
    out.data.assign(static_cast<std::size_t>(n) * w * out.dim, 0.0);

    for (int s = 0; s < n; ++s) {
        for (int t = 0; t < w; ++t) {
            std::size_t pos = (static_cast<std::size_t>(s) * w + t) * out.dim;
            for (int j : kept) {
                const auto& col = schema.columns[j];
                const RawCell& cell = raw.cells[s][t][j];
                if (col.kind == ColumnKind::numeric) {
                    out.data[pos++] = cell.missing ? mean[j] : cell.number;
                } else {
                    int idx = mode[j];
                    if (!cell.missing) {
                        auto it = std::find(col.categories.begin(), col.categories.end(),
                                            cell.category);
                        idx = static_cast<int>(it - col.categories.begin());
                    }
                    for (std::size_t k = 0; k < col.categories.size(); ++k) {
                        out.data[pos++] = (static_cast<int>(k) == idx) ? 1.0 : 0.0;
                    }
                }
            }
        }
    }
    return out;
}

EncodedCohort subset(const EncodedCohort& cohort, const std::vector<int>& indices) {
    cohort.validate();
    EncodedCohort out;
    out.n = static_cast<int>(indices.size());
    out.waves = cohort.waves;
    out.dim = cohort.dim;
    out.feature_names = cohort.feature_names;
    out.data.reserve(static_cast<std::size_t>(out.n) * out.waves * out.dim);
    out.labels.reserve(indices.size());
    const std::size_t stride = static_cast<std::size_t>(cohort.waves) * cohort.dim;
    for (int idx : indices) {
        if (idx < 0 || idx >= cohort.n) {
            throw DataError("subset index " + std::to_string(idx) + " outside cohort of " +
                            std::to_string(cohort.n));
        }
        const double* src = cohort.data.data() + idx * stride;
        out.data.insert(out.data.end(), src, src + stride);
        out.labels.push_back(cohort.labels[idx]);
    }
    return out;
}

EncodedCohort concat(const EncodedCohort& a, const EncodedCohort& b) {
    if (a.waves != b.waves || a.dim != b.dim || a.feature_names != b.feature_names) {
        throw DataError("cannot concatenate cohorts with different layouts");
    }
    EncodedCohort out = a;
    out.n += b.n;
    out.data.insert(out.data.end(), b.data.begin(), b.data.end());
    out.labels.insert(out.labels.end(), b.labels.begin(), b.labels.end());
    return out;
}

EncodedCohort take_first_waves(const EncodedCohort& cohort, int waves) {
    if (waves < 1 || waves > cohort.waves) {
        throw ParameterError("cannot take " + std::to_string(waves) + " waves from a cohort with " +
                             std::to_string(cohort.waves));
    }
    EncodedCohort out;
    out.n = cohort.n;
    out.waves = waves;
    out.dim = cohort.dim;
    out.feature_names = cohort.feature_names;
    out.labels = cohort.labels;
    out.data.reserve(static_cast<std::size_t>(out.n) * waves * out.dim);
    for (int s = 0; s < cohort.n; ++s) {
        const double* src = cohort.data.data() +
                            static_cast<std::size_t>(s) * cohort.waves * cohort.dim;
        out.data.insert(out.data.end(), src, src + static_cast<std::size_t>(waves) * out.dim);
    }
    return out;
}

namespace {

void fisher_yates(std::vector<int>& v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::swap(v[i - 1], v[rng.below(i)]);
    }
}

// Largest-remainder apportionment of n items across the ratios; ties go to
// the earlier split.
std::array<int, 3> apportion(int n, const std::array<double, 3>& ratios) {
    std::array<int, 3> counts{};
    std::array<double, 3> remainder{};
    int assigned = 0;
    for (int k = 0; k < 3; ++k) {
        const double target = ratios[k] * n;
        counts[k] = static_cast<int>(std::floor(target));
        remainder[k] = target - counts[k];
        assigned += counts[k];
    }
    std::array<int, 3> order = {0, 1, 2};
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return remainder[a] > remainder[b]; });
    for (int left = n - assigned, k = 0; left > 0; --left, ++k) counts[order[k]] += 1;
    return counts;
}

}  // namespace

SplitIndices stratified_split(const std::vector<int>& labels,
                              const std::array<double, 3>& ratios, Rng& rng) {
    double sum = 0.0;
    for (double r : ratios) {
        if (r < 0.0) throw ParameterError("split ratios must be non-negative");
        sum += r;
    }
    if (std::fabs(sum - 1.0) > 1e-9) {
        throw ParameterError("split ratios sum to " + std::to_string(sum) + ", expected 1");
    }

    std::vector<int> positives, negatives;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == 1) {
            positives.push_back(static_cast<int>(i));
        } else if (labels[i] == 0) {
            negatives.push_back(static_cast<int>(i));
        } else {
            throw DataError("label " + std::to_string(labels[i]) + " at index " +
                            std::to_string(i));
        }
    }

    SplitIndices out;
    for (auto* cls : {&positives, &negatives}) {  // positives first
        if (cls->size() < 3) {
            std::ostringstream os;
            os << "class " << (cls == &positives ? 1 : 0) << " has " << cls->size()
               << " members; stratified splitting needs at least 3";
            throw DataError(os.str());
        }
        fisher_yates(*cls, rng);
        const auto counts = apportion(static_cast<int>(cls->size()), ratios);
        auto it = cls->begin();
        out.train.insert(out.train.end(), it, it + counts[0]);
        it += counts[0];
        out.val.insert(out.val.end(), it, it + counts[1]);
        it += counts[1];
        out.test.insert(out.test.end(), it, it + counts[2]);
    }
    std::sort(out.train.begin(), out.train.end());
    std::sort(out.val.begin(), out.val.end());
    std::sort(out.test.begin(), out.test.end());
    return out;
}

void SynthConfig::validate() const {
    if (n_subjects < 1 || waves < 1) throw ConfigError("cohort size and waves must be positive");
    if (n_numeric < 0 || n_categorical < 0 || n_columns() < 1) {
        throw ConfigError("need a positive number of columns");
    }
    if (n_categorical > 0 && categories_per_column < 2) {
        throw ConfigError("categorical columns need at least 2 categories");
    }
    if (n_archetypes < 2) throw ConfigError("need at least 2 archetypes");
    if (positive_rate <= 0.0 || positive_rate >= 0.5) {
        throw ConfigError("positive_rate must lie in (0, 0.5)");
    }
    if (relevant_fraction <= 0.0 || relevant_fraction > 1.0) {
        throw ConfigError("relevant_fraction must lie in (0, 1]");
    }
    if (trend_strength < 0.0) throw ConfigError("trend_strength must be non-negative");
    if (noise_sigma <= 0.0) throw ConfigError("noise_sigma must be positive");
    if (missing_rate < 0.0 || missing_rate >= 1.0) {
        throw ConfigError("missing_rate must lie in [0, 1)");
    }
    const int r = relevant_per_archetype();
    if (r < 1) throw ConfigError("relevant_fraction selects zero columns per archetype");
    if (static_cast<long>(r) * n_archetypes > n_columns()) {
        std::ostringstream os;
        os << "archetypes need " << r << "x" << n_archetypes
           << " disjoint columns but only " << n_columns() << " exist";
        throw ConfigError(os.str());
    }
}

int SynthConfig::relevant_per_archetype() const {
    return static_cast<int>(std::lround(relevant_fraction * n_columns()));
}

SynthResult generate_synthetic(const SynthConfig& cfg) {
    cfg.validate();
    const int n = cfg.n_subjects;
    const int w = cfg.waves;
    const int n_cols = cfg.n_columns();
    const double rho = 0.7;          // wave-to-wave drift
    const double innovation = std::sqrt(1.0 - rho * rho);
    const double persistence = 0.8;  // chance a category carries over

    Rng master(cfg.seed);
    Rng columns_rng = master.fork(1);
    Rng layout_rng = master.fork(2);

    SynthResult result;
    result.schema.waves = w;
    for (int j = 0; j < cfg.n_numeric; ++j) {
        char name[16];
        std::snprintf(name, sizeof(name), "num%02d", j);
        result.schema.columns.push_back({name, ColumnKind::numeric, {}});
    }
    for (int j = 0; j < cfg.n_categorical; ++j) {
        char name[16];
        std::snprintf(name, sizeof(name), "cat%02d", j);
        std::vector<std::string> cats;
        for (int k = 0; k < cfg.categories_per_column; ++k) cats.push_back("c" + std::to_string(k));
        result.schema.columns.push_back({name, ColumnKind::categorical, std::move(cats)});
    }

    // Base distribution per column.
    std::vector<double> mu(n_cols, 0.0), sigma(n_cols, 1.0);
    std::vector<std::vector<double>> base_probs(n_cols);
    for (int j = 0; j < n_cols; ++j) {
        if (result.schema.columns[j].kind == ColumnKind::numeric) {
            mu[j] = columns_rng.normal();
            sigma[j] = columns_rng.uniform(0.5, 1.5);
        } else {
            std::vector<double> weights(cfg.categories_per_column);
            double total = 0.0;
            for (double& v : weights) {
                v = columns_rng.uniform(0.5, 1.5);
                total += v;
            }
            for (double& v : weights) v /= total;
            base_probs[j] = std::move(weights);
        }
    }

    // Disjoint relevant-column subsets and per-archetype signal parameters.
    const int relevant = cfg.relevant_per_archetype();
    std::vector<int> shuffled(n_cols);
    for (int j = 0; j < n_cols; ++j) shuffled[j] = j;
    fisher_yates(shuffled, layout_rng);
    std::vector<std::vector<double>> direction(cfg.n_archetypes,
                                               std::vector<double>(n_cols, 0.0));
    std::vector<std::vector<int>> signal_category(cfg.n_archetypes,
                                                  std::vector<int>(n_cols, 0));
    result.archetype_columns.resize(cfg.n_archetypes);
    for (int k = 0; k < cfg.n_archetypes; ++k) {
        auto& cols = result.archetype_columns[k];
        cols.assign(shuffled.begin() + static_cast<std::size_t>(k) * relevant,
                    shuffled.begin() + static_cast<std::size_t>(k + 1) * relevant);
        std::sort(cols.begin(), cols.end());
        for (int j : cols) {
            if (result.schema.columns[j].kind == ColumnKind::numeric) {
                direction[k][j] = layout_rng.bernoulli(0.5) ? 1.0 : -1.0;
            } else {
                signal_category[k][j] =
                    static_cast<int>(layout_rng.below(cfg.categories_per_column));
            }
        }
    }

    // Label placement and archetype rotation.
    const int n_pos = static_cast<int>(std::lround(cfg.positive_rate * n));
    std::vector<int> labels(n, 0);
    std::fill(labels.begin(), labels.begin() + n_pos, 1);
    fisher_yates(labels, layout_rng);
    result.archetype.assign(n, -1);
    int next_archetype = 0;
    for (int s = 0; s < n; ++s) {
        if (labels[s] == 1) {
            result.archetype[s] = next_archetype;
            next_archetype = (next_archetype + 1) % cfg.n_archetypes;
        }
    }

    result.cohort.labels = labels;
    result.cohort.subject_ids.resize(n);
    result.cohort.cells.assign(
        n, std::vector<std::vector<RawCell>>(w, std::vector<RawCell>(n_cols)));

    for (int s = 0; s < n; ++s) {
        char id[16];
        std::snprintf(id, sizeof(id), "s%06d", s);
        result.cohort.subject_ids[s] = id;

        Rng srng = master.fork(1000 + static_cast<std::uint64_t>(s));
        const int k = result.archetype[s];
        const double scale = (k >= 0) ? srng.uniform(0.5, 1.5) : 0.0;
        auto& grid = result.cohort.cells[s];

        for (int j = 0; j < n_cols; ++j) {
            const bool relevant_col = (k >= 0) && direction[k][j] != 0.0;
            const bool relevant_cat =
                (k >= 0) &&
                std::binary_search(result.archetype_columns[k].begin(),
                                   result.archetype_columns[k].end(), j) &&
                result.schema.columns[j].kind == ColumnKind::categorical;
            if (result.schema.columns[j].kind == ColumnKind::numeric) {
                double z = srng.normal();
                for (int t = 0; t < w; ++t) {
                    if (t > 0) z = rho * z + innovation * srng.normal();
                    const double ramp = static_cast<double>(t + 1) / w;
                    double value = mu[j] + cfg.noise_sigma * sigma[j] * z;
                    if (relevant_col) {
                        value += cfg.trend_strength * scale * ramp * ramp * sigma[j] *
                                 direction[k][j];
                    }
                    grid[t][j] = RawCell::num(value);
                }
            } else {
                const auto& probs = base_probs[j];
                int cat = 0;
                for (int t = 0; t < w; ++t) {
                    if (t == 0 || !srng.bernoulli(persistence)) {
                        const double u = srng.uniform01();
                        double cum = 0.0;
                        cat = static_cast<int>(probs.size()) - 1;
                        for (std::size_t c = 0; c < probs.size(); ++c) {
                            cum += probs[c];
                            if (u < cum) {
                                cat = static_cast<int>(c);
                                break;
                            }
                        }
                    }
                    int emitted = cat;
                    if (relevant_cat) {
                        const double ramp = static_cast<double>(t + 1) / w;
                        const double force =
                            std::clamp(cfg.trend_strength * scale * ramp * ramp, 0.0, 1.0);
                        if (srng.bernoulli(force)) emitted = signal_category[k][j];
                    }
                    grid[t][j] = RawCell::cat(result.schema.columns[j].categories[emitted]);
                }
            }
        }

        for (int t = 0; t < w; ++t) {
            for (int j = 0; j < n_cols; ++j) {
                if (srng.bernoulli(cfg.missing_rate)) grid[t][j] = RawCell::none();
            }
        }
    }

    return result;
}

}  // namespace mtnet
