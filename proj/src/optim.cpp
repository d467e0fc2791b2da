#include "mtnet/optim.hpp"

#include <cmath>

#include "mtnet/errors.hpp"

namespace mtnet {

void RmsPropConfig::validate() const {
    if (lr <= 0.0) throw ParameterError("RMSprop learning rate must be positive");
    if (rho <= 0.0 || rho >= 1.0) throw ParameterError("RMSprop rho must lie in (0, 1)");
    if (eps <= 0.0) throw ParameterError("RMSprop eps must be positive");
    if (grad_clip < 0.0) throw ParameterError("grad_clip must be non-negative");
}

RmsProp::RmsProp(const NetworkConfig& net_config, RmsPropConfig config)
    : config_(config), state_(zero_params(net_config)) {
    config_.validate();
}

void RmsProp::step(NetworkParams& params, const NetworkParams& grads) {
    if (!params.config.same_dims(state_.config) || !grads.config.same_dims(state_.config)) {
        throw ShapeError("optimizer state, parameters and gradients must share one shape set");
    }
    auto param_list = params.named();
    auto grad_list = grads.named();
    auto state_list = state_.named();

    const double lr = config_.lr;
    const double rho = config_.rho;
    const double eps = config_.eps;
    const double clip = config_.grad_clip;

    for (std::size_t idx = 0; idx < param_list.size(); ++idx) {
        Matrix& theta = *param_list[idx].second;
        const Matrix& g_mat = *grad_list[idx].second;
        Matrix& v_mat = *state_list[idx].second;

        double* th = theta.data();
        const double* g = g_mat.data();
        double* v = v_mat.data();
        for (std::size_t k = 0; k < theta.size(); ++k) {
            double gk = g[k];
            if (!std::isfinite(gk)) {
                throw DivergenceError("non-finite gradient in " + param_list[idx].first);
            }
            if (clip > 0.0) gk = std::clamp(gk, -clip, clip);
            v[k] = rho * v[k] + (1.0 - rho) * gk * gk;
            th[k] -= lr * gk / (std::sqrt(v[k]) + eps);
        }
    }
}

}  // namespace mtnet
