#pragma once

#include <vector>

#include "mtnet/data.hpp"
#include "mtnet/rng.hpp"

namespace mtnet {

struct BatchPlan {
    std::vector<std::vector<int>> batches;  // each: batch_size/2 positives then negatives
    int batch_size = 0;
};

// Class-balanced sampling with replacement: each batch holds exactly
// batch_size/2 indices drawn uniformly from each class pool. Replacement
// is what lets the minority class fill its half (oversampling).
BatchPlan balanced_batches(const std::vector<int>& labels, int batch_size, int n_batches,
                           Rng& rng);

// ceil(frac * n) guarded against representation error, so a mathematically
// integral product rounds to itself.
int ceil_frac(double frac, int n);

// Synthesizes (factor - 1) * P new positive samples from a positives-only
// training cohort. Each new sample copies a random parent A and overwrites
// ceil(swap_frac * D) positions of its LAST wave with a distinct donor B's
// values at the same positions. With group_atomic, every chosen position
// drags its whole one-hot group along (groups inferred from "name=value"
// feature names), keeping group sums intact at the cost of swapping more
// than the nominal count.
EncodedCohort augment_depression(const EncodedCohort& positives, int factor, double swap_frac,
                                 Rng& rng, bool group_atomic = false);

}  // namespace mtnet
