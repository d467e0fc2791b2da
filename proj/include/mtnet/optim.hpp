#pragma once

#include "mtnet/network.hpp"

namespace mtnet {

struct RmsPropConfig {
    double lr = 0.001;
    double rho = 0.9;
    double eps = 1e-7;
    double grad_clip = 0.0;  // absolute per-entry clip; 0 disables

    void validate() const;
};

// RMSprop with per-parameter accumulators, updating parameters in place:
//   v <- rho*v + (1-rho)*g^2
//   theta <- theta - lr * g / (sqrt(v) + eps)
class RmsProp {
public:
    RmsProp(const NetworkConfig& net_config, RmsPropConfig config);

    // Requires exclusive access to params and internal state. Throws
    // DivergenceError on non-finite gradients, ShapeError on mismatch.
    void step(NetworkParams& params, const NetworkParams& grads);

    const RmsPropConfig& config() const { return config_; }
    const NetworkParams& accumulators() const { return state_; }

private:
    RmsPropConfig config_;
    NetworkParams state_;  // v, same shapes as the parameters
};

}  // namespace mtnet
