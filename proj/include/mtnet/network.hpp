#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mtnet/matrix.hpp"
#include "mtnet/rng.hpp"

namespace mtnet {

struct NetworkConfig {
    int input_dim = 762;     // per-wave feature count D
    int waves = 5;           // time steps w
    int lstm_units = 200;    // L
    int feature_dim = 20;    // M
    double dropout_rate = 0.5;

    void validate() const;
    bool same_dims(const NetworkConfig& other) const;
};

// All learnable parameters. The LSTM weights and the FC feature layer
// (w_s, b_s) form the shared trunk; both output heads read the same
// storage, so a gradient step on the trunk moves every task at once.
struct NetworkParams {
    // LSTM gates, order: input, forget, candidate, output.
    Matrix w_xi, w_xf, w_xg, w_xo;  // L x D
    Matrix w_hi, w_hf, w_hg, w_ho;  // L x L
    Matrix b_i, b_f, b_g, b_o;      // L x 1
    // Shared FC feature layer.
    Matrix w_s;  // M x L
    Matrix b_s;  // M x 1
    // Classification head.
    Matrix w_e;  // 1 x M
    Matrix b_e;  // 1 x 1
    // Anomaly-score head.
    Matrix w_a;  // 1 x M
    Matrix b_a;  // 1 x 1

    NetworkConfig config;

    // Fixed enumeration order; defines checkpoint payload order and the
    // flattened parameter-vector layout.
    std::vector<std::pair<std::string, Matrix*>> named();
    std::vector<std::pair<std::string, const Matrix*>> named() const;
    std::size_t param_count() const;
};

// Zero-filled parameter set with the config's shapes (gradient buffers).
NetworkParams zero_params(const NetworkConfig& config);

// Glorot-uniform weights (bound sqrt(6/(fan_in+fan_out)) per matrix),
// zero biases, forget-gate bias 1.0. Deterministic in the rng seed.
NetworkParams init_params(const NetworkConfig& config, Rng& rng);

// Flattened view of all parameters in named() order, row-major per matrix.
Matrix flatten_params(const NetworkParams& params);
void unflatten_params(const Matrix& flat, NetworkParams& params);

// Cached activations of one forward call; replaying it backward yields
// deterministic gradients.
struct ForwardTrace {
    NetworkConfig config;
    Mode mode = Mode::eval;
    Matrix input;                                       // w x D
    std::vector<double> gate_i, gate_f, gate_g, gate_o; // w*L each
    std::vector<double> cell, cell_tanh, hidden;        // w*L each
    Matrix mask_h;       // L x 1 dropout factors on h_w
    Matrix mask_q;       // M x 1 dropout factors on the feature vector
    Matrix h_dropped;    // L x 1
    std::vector<double> fc_pre;  // M, pre-relu FC activations
    Matrix q;            // M x 1 feature representation (after relu and mask)
    double logit_e = 0.0;
    double p = 0.0;
    double score = 0.0;
};

struct ForwardResult {
    Matrix q;      // M x 1
    double p;      // classification probability
    double score;  // raw anomaly score (no activation)
};

// Runs the LSTM recurrence over the waves of X (rows), then the FC feature
// map and both heads:
//   c_t = f_t.c_{t-1} + i_t.g_t,  h_t = o_t.tanh(c_t)   (c_0 = h_0 = 0)
//   q = relu(W_s h_w + b_s)   with dropout on h_w and on q per mode
//   p = sigmoid(W_e q + b_e),  score = W_a q + b_a
// Gates use sigmoid, the candidate uses tanh. Train mode draws dropout
// masks from rng; eval mode consumes no draws.
ForwardResult forward(const Matrix& X, const NetworkParams& params, Mode mode, Rng& rng,
                      ForwardTrace& trace);
ForwardResult forward(const Matrix& X, const NetworkParams& params, Mode mode, Rng& rng);

// Backpropagation through time for the upstream signals d_p (through the
// sigmoid), d_score and d_q (M x 1). Gradients are accumulated into
// `grads` (callers zero it first); the dropout masks recorded in the trace
// are applied.
void backward_acc(const ForwardTrace& trace, double d_p, double d_score, const Matrix& d_q,
                  const NetworkParams& params, NetworkParams& grads);
NetworkParams backward(const ForwardTrace& trace, double d_p, double d_score, const Matrix& d_q,
                       const NetworkParams& params);

}  // namespace mtnet
