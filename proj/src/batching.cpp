#include "mtnet/batching.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mtnet/errors.hpp"

namespace mtnet {

BatchPlan balanced_batches(const std::vector<int>& labels, int batch_size, int n_batches,
                           Rng& rng) {
    if (batch_size < 2 || batch_size % 2 != 0) {
        throw ParameterError("batch_size must be a positive even number, got " +
                             std::to_string(batch_size));
    }
    if (n_batches < 1) throw ParameterError("need at least one batch per epoch");

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
    if (positives.empty() || negatives.empty()) {
        throw DataError("balanced sampling needs both classes present");
    }

    const int half = batch_size / 2;
    BatchPlan plan;
    plan.batch_size = batch_size;
    plan.batches.reserve(static_cast<std::size_t>(n_batches));
    for (int b = 0; b < n_batches; ++b) {
        std::vector<int> batch;
        batch.reserve(static_cast<std::size_t>(batch_size));
        for (int k = 0; k < half; ++k) batch.push_back(positives[rng.index(positives.size())]);
        for (int k = 0; k < half; ++k) batch.push_back(negatives[rng.index(negatives.size())]);
        plan.batches.push_back(std::move(batch));
    }
    return plan;
}

int ceil_frac(double frac, int n) {
    if (frac <= 0.0 || n < 0) throw ParameterError("ceil_frac needs a positive fraction");
    const double raw = std::ceil(frac * static_cast<double>(n) - 1e-9);
    return std::max(1, static_cast<int>(raw));
}

EncodedCohort augment_depression(const EncodedCohort& positives, int factor, double swap_frac,
                                 Rng& rng, bool group_atomic) {
    positives.validate();
    if (factor < 1) throw ParameterError("augmentation factor must be at least 1");
    if (swap_frac <= 0.0 || swap_frac >= 1.0) {
        throw ParameterError("swap_frac must lie in (0, 1)");
    }
    for (int y : positives.labels) {
        if (y != 1) {
            throw DataError("augmentation input must hold positive samples only");
        }
    }
    const int p = positives.n;
    if (p < 2) {
        throw DataError("augmentation needs at least 2 positive samples, got " +
                        std::to_string(p));
    }

    const int d = positives.dim;
    const int last = positives.waves - 1;
    const int n_swap = ceil_frac(swap_frac, d);

    // one-hot group of each feature, from "column=value" names
    std::vector<std::vector<int>> group_of(d);
    if (group_atomic) {
        std::vector<std::pair<std::string, int>> keyed;
        for (int f = 0; f < d; ++f) {
            const auto& name = positives.feature_names[f];
            const auto eq = name.find('=');
            keyed.emplace_back(eq == std::string::npos ? name + "\n" + std::to_string(f)
                                                       : name.substr(0, eq),
                               f);
        }
        for (int f = 0; f < d; ++f) {
            for (const auto& [key, g] : keyed) {
                if (key == keyed[f].first) group_of[f].push_back(g);
            }
        }
    }

    EncodedCohort out;
    out.waves = positives.waves;
    out.dim = d;
    out.feature_names = positives.feature_names;
    out.n = (factor - 1) * p;
    out.labels.assign(static_cast<std::size_t>(out.n), 1);
    out.data.reserve(static_cast<std::size_t>(out.n) * out.waves * d);

    std::vector<int> pool(d);
    const std::size_t stride = static_cast<std::size_t>(positives.waves) * d;
    for (int s = 0; s < out.n; ++s) {
        const int a = static_cast<int>(rng.below(static_cast<std::uint64_t>(p)));
        int b = static_cast<int>(rng.below(static_cast<std::uint64_t>(p - 1)));
        if (b >= a) ++b;

        const std::size_t begin = out.data.size();
        const double* parent = positives.data.data() + static_cast<std::size_t>(a) * stride;
        out.data.insert(out.data.end(), parent, parent + stride);

        for (int f = 0; f < d; ++f) pool[f] = f;
        double* last_wave = out.data.data() + begin + static_cast<std::size_t>(last) * d;
        const double* donor = positives.data.data() + static_cast<std::size_t>(b) * stride +
                              static_cast<std::size_t>(last) * d;
        for (int k = 0; k < n_swap; ++k) {
            const int pick = k + static_cast<int>(rng.below(static_cast<std::uint64_t>(d - k)));
            std::swap(pool[k], pool[pick]);
            const int f = pool[k];
            if (group_atomic && !group_of[f].empty()) {
                for (int g : group_of[f]) last_wave[g] = donor[g];
            } else {
                last_wave[f] = donor[f];
            }
        }
    }
    return out;
}

}  // namespace mtnet
