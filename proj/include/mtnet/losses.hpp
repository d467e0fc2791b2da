#pragma once

#include <vector>

#include "mtnet/matrix.hpp"

namespace mtnet {

// Hyperparameters of the joint objective
//   total = l_e + alpha * l_a + beta * l_o
// plus the frozen one-class center. The center is drawn once from a
// standard Gaussian at model creation and never trained.
struct LossConfig {
    double alpha = 0.5;
    double beta = 2.0;
    double prior_mu = 0.0;
    double prior_sigma = 1.0;
    double a_margin = 5.0;  // required deviation of positives, in prior sigmas
    double m_margin = 1.0;  // one-class contrast margin
    Matrix center;          // M x 1

    void validate() const;
};

struct ScalarLoss {
    double value;
    double grad;
};

struct VectorLoss {
    double value;
    Matrix grad;
};

// Binary cross-entropy on the classification probability. p is clamped
// into [1e-7, 1-1e-7] before the log; the gradient is evaluated at the
// clamped value.
ScalarLoss bce(double p, int y);

// Z-score deviation of a raw anomaly score under the Gaussian prior.
double deviation(double score, const LossConfig& cfg);

// Deviation ranking loss:
//   (1-y)*|dev| + y*max(0, a - dev)
// Normals are pinned to the prior mean, positives pushed at least a sigmas
// above it. Subgradient 0 at the kinks (dev == 0 for y=0, dev == a for y=1).
ScalarLoss deviation_loss(double score, int y, const LossConfig& cfg);

// Contrastive one-class loss on the feature vector:
//   d = ||q - n||_2,  (1-y)*d + y*max(0, m - d)
// Gradient through (q - n)/d, taken as zero when d == 0.
VectorLoss oneclass_loss(const Matrix& q, int y, const LossConfig& cfg);

// Batch-mean joint loss plus the per-sample upstream gradients for the
// network backward pass. d_p/d_score/d_q already carry the alpha/beta
// weights and the 1/|B| factor. A zero alpha (or beta) skips its term
// entirely: the recorded l_a (or l_o) is 0 and nothing is propagated.
struct SampleOutput {
    Matrix q;
    double p;
    double score;
};

struct LossBundle {
    double l_e = 0.0;
    double l_a = 0.0;
    double l_o = 0.0;
    double total = 0.0;
    std::vector<double> d_p;
    std::vector<double> d_score;
    std::vector<Matrix> d_q;
};

LossBundle total_batch_loss(const std::vector<SampleOutput>& outputs,
                            const std::vector<int>& labels, const LossConfig& cfg);

}  // namespace mtnet
