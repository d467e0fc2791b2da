#include "mtnet/network.hpp"

#include <cmath>
#include <cstring>
#include <sstream>

#include "mtnet/errors.hpp"

namespace mtnet {

void NetworkConfig::validate() const {
    if (input_dim < 1 || waves < 1 || lstm_units < 1 || feature_dim < 1) {
        std::ostringstream os;
        os << "network config dimensions must be positive: D=" << input_dim << " w=" << waves
           << " L=" << lstm_units << " M=" << feature_dim;
        throw ParameterError(os.str());
    }
    if (dropout_rate < 0.0 || dropout_rate >= 1.0) {
        throw ParameterError("dropout_rate must lie in [0, 1)");
    }
}

bool NetworkConfig::same_dims(const NetworkConfig& other) const {
    return input_dim == other.input_dim && waves == other.waves &&
           lstm_units == other.lstm_units && feature_dim == other.feature_dim;
}

std::vector<std::pair<std::string, Matrix*>> NetworkParams::named() {
    return {
        {"w_xi", &w_xi}, {"w_xf", &w_xf}, {"w_xg", &w_xg}, {"w_xo", &w_xo},
        {"w_hi", &w_hi}, {"w_hf", &w_hf}, {"w_hg", &w_hg}, {"w_ho", &w_ho},
        {"b_i", &b_i},   {"b_f", &b_f},   {"b_g", &b_g},   {"b_o", &b_o},
        {"w_s", &w_s},   {"b_s", &b_s},
        {"w_e", &w_e},   {"b_e", &b_e},
        {"w_a", &w_a},   {"b_a", &b_a},
    };
}

std::vector<std::pair<std::string, const Matrix*>> NetworkParams::named() const {
    std::vector<std::pair<std::string, const Matrix*>> out;
    for (auto& [name, mat] : const_cast<NetworkParams*>(this)->named()) out.emplace_back(name, mat);
    return out;
}

std::size_t NetworkParams::param_count() const {
    std::size_t n = 0;
    for (auto& [name, mat] : named()) n += mat->size();
    return n;
}

NetworkParams zero_params(const NetworkConfig& config) {
    config.validate();
    const int l = config.lstm_units;
    const int d = config.input_dim;
    const int m = config.feature_dim;
    NetworkParams p;
    p.w_xi = Matrix(l, d); p.w_xf = Matrix(l, d); p.w_xg = Matrix(l, d); p.w_xo = Matrix(l, d);
    p.w_hi = Matrix(l, l); p.w_hf = Matrix(l, l); p.w_hg = Matrix(l, l); p.w_ho = Matrix(l, l);
    p.b_i = Matrix(l, 1);  p.b_f = Matrix(l, 1);  p.b_g = Matrix(l, 1);  p.b_o = Matrix(l, 1);
    p.w_s = Matrix(m, l);  p.b_s = Matrix(m, 1);
    p.w_e = Matrix(1, m);  p.b_e = Matrix(1, 1);
    p.w_a = Matrix(1, m);  p.b_a = Matrix(1, 1);
    p.config = config;
    return p;
}

NetworkParams init_params(const NetworkConfig& config, Rng& rng) {
    NetworkParams p = zero_params(config);
    auto glorot = [&rng](Matrix& w, int fan_in, int fan_out) {
        const double limit = std::sqrt(6.0 / (fan_in + fan_out));
        double* v = w.data();
        for (std::size_t i = 0; i < w.size(); ++i) v[i] = rng.uniform(-limit, limit);
    };
    const int l = config.lstm_units;
    const int d = config.input_dim;
    const int m = config.feature_dim;
    glorot(p.w_xi, d, l); glorot(p.w_xf, d, l); glorot(p.w_xg, d, l); glorot(p.w_xo, d, l);
    glorot(p.w_hi, l, l); glorot(p.w_hf, l, l); glorot(p.w_hg, l, l); glorot(p.w_ho, l, l);
    glorot(p.w_s, l, m);
    glorot(p.w_e, m, 1);
    glorot(p.w_a, m, 1);
    p.b_f.fill(1.0);  // forget-gate bias starts open
    return p;
}

Matrix flatten_params(const NetworkParams& params) {
    std::vector<double> flat;
    flat.reserve(params.param_count());
    for (auto& [name, mat] : params.named()) {
        flat.insert(flat.end(), mat->data(), mat->data() + mat->size());
    }
    const int n = static_cast<int>(flat.size());
    return Matrix(n, 1, std::move(flat));
}

void unflatten_params(const Matrix& flat, NetworkParams& params) {
    if (flat.size() != params.param_count()) {
        std::ostringstream os;
        os << "flattened vector has " << flat.size() << " entries, parameters need "
           << params.param_count();
        throw ShapeError(os.str());
    }
    const double* src = flat.data();
    for (auto& [name, mat] : params.named()) {
        std::memcpy(mat->data(), src, mat->size() * sizeof(double));
        src += mat->size();
    }
}

namespace {

void check_input_shape(const Matrix& X, const NetworkConfig& cfg) {
    if (X.rows() != cfg.waves || X.cols() != cfg.input_dim) {
        std::ostringstream os;
        os << "input is " << X.shape_str() << ", network expects " << cfg.waves << "x"
           << cfg.input_dim << " (waves x features)";
        throw ShapeError(os.str());
    }
}

}  // namespace

ForwardResult forward(const Matrix& X, const NetworkParams& params, Mode mode, Rng& rng,
                      ForwardTrace& trace) {
    const NetworkConfig& cfg = params.config;
    check_input_shape(X, cfg);
    const int l = cfg.lstm_units;
    const int m = cfg.feature_dim;
    const int w = cfg.waves;
    const int d = cfg.input_dim;

    trace.config = cfg;
    trace.mode = mode;
    trace.input = X;
    const std::size_t wl = static_cast<std::size_t>(w) * l;
    trace.gate_i.assign(wl, 0.0);
    trace.gate_f.assign(wl, 0.0);
    trace.gate_g.assign(wl, 0.0);
    trace.gate_o.assign(wl, 0.0);
    trace.cell.assign(wl, 0.0);
    trace.cell_tanh.assign(wl, 0.0);
    trace.hidden.assign(wl, 0.0);

    std::vector<double> pre_i(l), pre_f(l), pre_g(l), pre_o(l);
    const double* h_prev = nullptr;  // null for t=0 (h_0 = 0)
    const double* c_prev = nullptr;

    for (int t = 0; t < w; ++t) {
        const double* x_t = X.row(t);
        std::memcpy(pre_i.data(), params.b_i.data(), l * sizeof(double));
        std::memcpy(pre_f.data(), params.b_f.data(), l * sizeof(double));
        std::memcpy(pre_g.data(), params.b_g.data(), l * sizeof(double));
        std::memcpy(pre_o.data(), params.b_o.data(), l * sizeof(double));
        gemv_acc(params.w_xi.data(), l, d, x_t, pre_i.data());
        gemv_acc(params.w_xf.data(), l, d, x_t, pre_f.data());
        gemv_acc(params.w_xg.data(), l, d, x_t, pre_g.data());
        gemv_acc(params.w_xo.data(), l, d, x_t, pre_o.data());
        if (h_prev != nullptr) {
            gemv_acc(params.w_hi.data(), l, l, h_prev, pre_i.data());
            gemv_acc(params.w_hf.data(), l, l, h_prev, pre_f.data());
            gemv_acc(params.w_hg.data(), l, l, h_prev, pre_g.data());
            gemv_acc(params.w_ho.data(), l, l, h_prev, pre_o.data());
        }
        double* it = trace.gate_i.data() + static_cast<std::size_t>(t) * l;
        double* ft = trace.gate_f.data() + static_cast<std::size_t>(t) * l;
        double* gt = trace.gate_g.data() + static_cast<std::size_t>(t) * l;
        double* ot = trace.gate_o.data() + static_cast<std::size_t>(t) * l;
        double* ct = trace.cell.data() + static_cast<std::size_t>(t) * l;
        double* tct = trace.cell_tanh.data() + static_cast<std::size_t>(t) * l;
        double* ht = trace.hidden.data() + static_cast<std::size_t>(t) * l;
        for (int k = 0; k < l; ++k) {
            it[k] = sigmoid(pre_i[k]);
            ft[k] = sigmoid(pre_f[k]);
            gt[k] = std::tanh(pre_g[k]);
            ot[k] = sigmoid(pre_o[k]);
            const double c_before = c_prev != nullptr ? c_prev[k] : 0.0;
            ct[k] = ft[k] * c_before + it[k] * gt[k];
            tct[k] = std::tanh(ct[k]);
            ht[k] = ot[k] * tct[k];
        }
        h_prev = ht;
        c_prev = ct;
    }

    // Dropout on the last hidden state, FC feature map, dropout on the feature.
    Matrix h_w(l, 1);
    std::memcpy(h_w.data(), h_prev, l * sizeof(double));
    DropoutResult drop_h = dropout_apply(h_w, cfg.dropout_rate, rng, mode);
    trace.mask_h = std::move(drop_h.mask);
    trace.h_dropped = std::move(drop_h.output);

    trace.fc_pre.assign(m, 0.0);
    std::memcpy(trace.fc_pre.data(), params.b_s.data(), m * sizeof(double));
    gemv_acc(params.w_s.data(), m, l, trace.h_dropped.data(), trace.fc_pre.data());

    Matrix feat(m, 1);
    for (int k = 0; k < m; ++k) feat.data()[k] = relu(trace.fc_pre[k]);
    DropoutResult drop_q = dropout_apply(feat, cfg.dropout_rate, rng, mode);
    trace.mask_q = std::move(drop_q.mask);
    trace.q = std::move(drop_q.output);

    trace.logit_e = params.b_e(0, 0) + dot(params.w_e.data(), trace.q.data(), m);
    trace.p = sigmoid(trace.logit_e);
    trace.score = params.b_a(0, 0) + dot(params.w_a.data(), trace.q.data(), m);

    return ForwardResult{trace.q, trace.p, trace.score};
}

ForwardResult forward(const Matrix& X, const NetworkParams& params, Mode mode, Rng& rng) {
    ForwardTrace trace;
    return forward(X, params, mode, rng, trace);
}

void backward_acc(const ForwardTrace& trace, double d_p, double d_score, const Matrix& d_q,
                  const NetworkParams& params, NetworkParams& grads) {
    const NetworkConfig& cfg = params.config;
    if (!trace.config.same_dims(cfg)) {
        throw ConsistencyError("forward trace dimensions do not match the given parameters");
    }
    if (!grads.config.same_dims(cfg)) {
        throw ConsistencyError("gradient buffer dimensions do not match the given parameters");
    }
    const int l = cfg.lstm_units;
    const int m = cfg.feature_dim;
    const int w = cfg.waves;
    const int d = cfg.input_dim;
    if (d_q.rows() != m || d_q.cols() != 1) {
        throw ShapeError("d_q is " + d_q.shape_str() + ", expected " + std::to_string(m) + "x1");
    }

    // Heads.
    const double d_logit_e = d_p * trace.p * (1.0 - trace.p);
    outer_acc(grads.w_e.data(), 1, m, &d_logit_e, trace.q.data());
    grads.b_e(0, 0) += d_logit_e;
    outer_acc(grads.w_a.data(), 1, m, &d_score, trace.q.data());
    grads.b_a(0, 0) += d_score;

    // Feature vector: upstream from the one-class signal plus both heads,
    // through the q-dropout mask and the relu.
    std::vector<double> d_feat(m);
    for (int k = 0; k < m; ++k) {
        const double up = d_q.data()[k] + d_logit_e * params.w_e.data()[k] + d_score * params.w_a.data()[k];
        const double masked = up * trace.mask_q.data()[k];
        d_feat[k] = trace.fc_pre[k] > 0.0 ? masked : 0.0;
    }
    outer_acc(grads.w_s.data(), m, l, d_feat.data(), trace.h_dropped.data());
    for (int k = 0; k < m; ++k) grads.b_s.data()[k] += d_feat[k];

    std::vector<double> d_h(l, 0.0);
    gemv_t_acc(params.w_s.data(), m, l, d_feat.data(), d_h.data());
    for (int k = 0; k < l; ++k) d_h[k] *= trace.mask_h.data()[k];

    // Backpropagation through time.
    std::vector<double> d_c(l, 0.0), da_i(l), da_f(l), da_g(l), da_o(l), d_h_prev(l);
    for (int t = w - 1; t >= 0; --t) {
        const double* it = trace.gate_i.data() + static_cast<std::size_t>(t) * l;
        const double* ft = trace.gate_f.data() + static_cast<std::size_t>(t) * l;
        const double* gt = trace.gate_g.data() + static_cast<std::size_t>(t) * l;
        const double* ot = trace.gate_o.data() + static_cast<std::size_t>(t) * l;
        const double* tct = trace.cell_tanh.data() + static_cast<std::size_t>(t) * l;
        const double* c_prev =
            t > 0 ? trace.cell.data() + static_cast<std::size_t>(t - 1) * l : nullptr;
        const double* h_prev =
            t > 0 ? trace.hidden.data() + static_cast<std::size_t>(t - 1) * l : nullptr;
        const double* x_t = trace.input.row(t);

        for (int k = 0; k < l; ++k) {
            const double dck = d_h[k] * ot[k] * (1.0 - tct[k] * tct[k]) + d_c[k];
            const double c_before = c_prev != nullptr ? c_prev[k] : 0.0;
            da_o[k] = d_h[k] * tct[k] * ot[k] * (1.0 - ot[k]);
            da_f[k] = dck * c_before * ft[k] * (1.0 - ft[k]);
            da_i[k] = dck * gt[k] * it[k] * (1.0 - it[k]);
            da_g[k] = dck * it[k] * (1.0 - gt[k] * gt[k]);
            d_c[k] = dck * ft[k];
        }

        outer_acc(grads.w_xi.data(), l, d, da_i.data(), x_t);
        outer_acc(grads.w_xf.data(), l, d, da_f.data(), x_t);
        outer_acc(grads.w_xg.data(), l, d, da_g.data(), x_t);
        outer_acc(grads.w_xo.data(), l, d, da_o.data(), x_t);
        for (int k = 0; k < l; ++k) {
            grads.b_i.data()[k] += da_i[k];
            grads.b_f.data()[k] += da_f[k];
            grads.b_g.data()[k] += da_g[k];
            grads.b_o.data()[k] += da_o[k];
        }
        if (h_prev != nullptr) {
            outer_acc(grads.w_hi.data(), l, l, da_i.data(), h_prev);
            outer_acc(grads.w_hf.data(), l, l, da_f.data(), h_prev);
            outer_acc(grads.w_hg.data(), l, l, da_g.data(), h_prev);
            outer_acc(grads.w_ho.data(), l, l, da_o.data(), h_prev);

            std::fill(d_h_prev.begin(), d_h_prev.end(), 0.0);
            gemv_t_acc(params.w_hi.data(), l, l, da_i.data(), d_h_prev.data());
            gemv_t_acc(params.w_hf.data(), l, l, da_f.data(), d_h_prev.data());
            gemv_t_acc(params.w_hg.data(), l, l, da_g.data(), d_h_prev.data());
            gemv_t_acc(params.w_ho.data(), l, l, da_o.data(), d_h_prev.data());
            std::swap(d_h, d_h_prev);
        }
    }
}

NetworkParams backward(const ForwardTrace& trace, double d_p, double d_score, const Matrix& d_q,
                       const NetworkParams& params) {
    NetworkParams grads = zero_params(params.config);
    backward_acc(trace, d_p, d_score, d_q, params, grads);
    return grads;
}

}  // namespace mtnet
