#include "mtnet/losses.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mtnet/errors.hpp"

namespace mtnet {

namespace {
constexpr double kProbClamp = 1e-7;

void check_label(int y) {
    if (y != 0 && y != 1) {
        throw ParameterError("class label must be 0 or 1, got " + std::to_string(y));
    }
}
}  // namespace

void LossConfig::validate() const {
    if (alpha < 0.0 || beta < 0.0) throw ParameterError("alpha and beta must be non-negative");
    if (prior_sigma <= 0.0) throw ParameterError("prior_sigma must be positive");
    if (a_margin <= 0.0) throw ParameterError("a_margin must be positive");
    if (m_margin <= 0.0) throw ParameterError("m_margin must be positive");
    if (center.cols() != 1 || center.rows() < 1) {
        throw ShapeError("one-class center must be an M x 1 vector, got " + center.shape_str());
    }
}

ScalarLoss bce(double p, int y) {
    check_label(y);
    const double pc = std::clamp(p, kProbClamp, 1.0 - kProbClamp);
    const double value = -(y * std::log(pc) + (1 - y) * std::log(1.0 - pc));
    const double grad = -y / pc + (1 - y) / (1.0 - pc);
    return {value, grad};
}

double deviation(double score, const LossConfig& cfg) {
    return (score - cfg.prior_mu) / cfg.prior_sigma;
}

ScalarLoss deviation_loss(double score, int y, const LossConfig& cfg) {
    check_label(y);
    const double dev = deviation(score, cfg);
    const double d_dev_d_score = 1.0 / cfg.prior_sigma;
    if (y == 0) {
        if (dev == 0.0) return {0.0, 0.0};
        return {std::fabs(dev), (dev > 0.0 ? 1.0 : -1.0) * d_dev_d_score};
    }
    const double slack = cfg.a_margin - dev;
    if (slack > 0.0) return {slack, -d_dev_d_score};
    return {0.0, 0.0};
}

VectorLoss oneclass_loss(const Matrix& q, int y, const LossConfig& cfg) {
    check_label(y);
    if (!q.same_shape(cfg.center)) {
        throw ShapeError("feature vector " + q.shape_str() + " vs one-class center " +
                         cfg.center.shape_str());
    }
    const int m = q.rows();
    Matrix diff = sub(q, cfg.center);
    double dist = std::sqrt(dot(diff.data(), diff.data(), m));
    Matrix grad(m, 1);
    if (y == 0) {
        if (dist > 0.0) {
            for (int k = 0; k < m; ++k) grad.data()[k] = diff.data()[k] / dist;
        }
        return {dist, std::move(grad)};
    }
    const double slack = cfg.m_margin - dist;
    if (slack > 0.0) {
        if (dist > 0.0) {
            for (int k = 0; k < m; ++k) grad.data()[k] = -diff.data()[k] / dist;
        }
        return {slack, std::move(grad)};
    }
    return {0.0, std::move(grad)};
}

LossBundle total_batch_loss(const std::vector<SampleOutput>& outputs,
                            const std::vector<int>& labels, const LossConfig& cfg) {
    if (outputs.empty()) throw DataError("total_batch_loss: empty batch");
    if (outputs.size() != labels.size()) {
        std::ostringstream os;
        os << "total_batch_loss: " << outputs.size() << " outputs vs " << labels.size()
           << " labels";
        throw DataError(os.str());
    }
    cfg.validate();

    const std::size_t n = outputs.size();
    const double inv_n = 1.0 / static_cast<double>(n);
    const int m = cfg.center.rows();

    LossBundle bundle;
    bundle.d_p.assign(n, 0.0);
    bundle.d_score.assign(n, 0.0);
    bundle.d_q.assign(n, Matrix(m, 1));

    for (std::size_t i = 0; i < n; ++i) {
        const int y = labels[i];
        const ScalarLoss e = bce(outputs[i].p, y);
        bundle.l_e += e.value * inv_n;
        bundle.d_p[i] = e.grad * inv_n;

        if (cfg.alpha > 0.0) {
            const ScalarLoss a = deviation_loss(outputs[i].score, y, cfg);
            bundle.l_a += a.value * inv_n;
            bundle.d_score[i] = cfg.alpha * a.grad * inv_n;
        }
        if (cfg.beta > 0.0) {
            VectorLoss o = oneclass_loss(outputs[i].q, y, cfg);
            bundle.l_o += o.value * inv_n;
            bundle.d_q[i] = scale(o.grad, cfg.beta * inv_n);
        }
    }
    bundle.total = bundle.l_e + cfg.alpha * bundle.l_a + cfg.beta * bundle.l_o;
    return bundle;
}

}  // namespace mtnet
