#include <doctest.h>

#include <cmath>
#include <limits>

#include "mtnet/errors.hpp"
#include "mtnet/optim.hpp"

using namespace mtnet;

namespace {

NetworkConfig tiny_config() {
    NetworkConfig cfg;
    cfg.input_dim = 2;
    cfg.waves = 1;
    cfg.lstm_units = 2;
    cfg.feature_dim = 1;
    cfg.dropout_rate = 0.0;
    return cfg;
}

}  // namespace

TEST_SUITE_BEGIN("optim");

TEST_CASE("config validation") {
    RmsPropConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.lr = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ParameterError);
    cfg = RmsPropConfig{};
    cfg.rho = 1.0;
    CHECK_THROWS_AS(cfg.validate(), ParameterError);
    cfg = RmsPropConfig{};
    cfg.eps = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ParameterError);
    cfg = RmsPropConfig{};
    cfg.grad_clip = -1.0;
    CHECK_THROWS_AS(cfg.validate(), ParameterError);
}

TEST_CASE("one step on a scalar parameter matches the closed form") {
    auto net = tiny_config();
    RmsPropConfig cfg;  // lr 0.001, rho 0.9, eps 1e-7
    RmsProp opt(net, cfg);

    auto params = zero_params(net);
    params.b_e(0, 0) = 1.0;
    auto grads = zero_params(net);
    grads.b_e(0, 0) = 1.0;

    opt.step(params, grads);

    // v = 0.1, theta = 1 - 0.001/(sqrt(0.1)+1e-7)
    const double expect = 1.0 - 0.001 / (std::sqrt(0.1) + 1e-7);
    CHECK(params.b_e(0, 0) == doctest::Approx(expect).epsilon(1e-12));
    CHECK(params.b_e(0, 0) == doctest::Approx(0.9968377).epsilon(1e-6));
    CHECK(opt.accumulators().b_e(0, 0) == doctest::Approx(0.1).epsilon(1e-12));

    // untouched parameters stay put
    CHECK(params.w_xi == Matrix(net.lstm_units, net.input_dim));
}

TEST_CASE("zero gradients decay the accumulator but leave parameters alone") {
    auto net = tiny_config();
    RmsProp opt(net, RmsPropConfig{});
    auto params = zero_params(net);
    params.b_a(0, 0) = 2.5;
    auto grads = zero_params(net);
    grads.b_a(0, 0) = 1.0;
    opt.step(params, grads);
    const double after_one = params.b_a(0, 0);
    const double v_after_one = opt.accumulators().b_a(0, 0);

    grads.b_a(0, 0) = 0.0;
    opt.step(params, grads);
    CHECK(params.b_a(0, 0) == after_one);
    CHECK(opt.accumulators().b_a(0, 0) == doctest::Approx(0.9 * v_after_one).epsilon(1e-12));
}

TEST_CASE("descends a quadratic bowl") {
    auto net = tiny_config();
    RmsPropConfig cfg;
    cfg.lr = 0.05;
    RmsProp opt(net, cfg);
    auto params = zero_params(net);
    params.b_e(0, 0) = 1.0;
    for (int it = 0; it < 100; ++it) {
        auto grads = zero_params(net);
        grads.b_e(0, 0) = 2.0 * params.b_e(0, 0);
        opt.step(params, grads);
    }
    CHECK(std::fabs(params.b_e(0, 0)) < 0.5);
}

TEST_CASE("first step size is bounded by lr over sqrt(1 - rho)") {
    auto net = tiny_config();
    RmsPropConfig cfg;
    RmsProp opt(net, cfg);
    auto params = zero_params(net);
    auto grads = zero_params(net);
    grads.w_e(0, 0) = 123.456;  // magnitude cancels in g / sqrt((1-rho) g^2)
    opt.step(params, grads);
    const double bound = cfg.lr / std::sqrt(1.0 - cfg.rho) + 1e-9;
    CHECK(std::fabs(params.w_e(0, 0)) <= bound);
}

TEST_CASE("two optimizers given identical sequences stay bitwise identical") {
    auto net = tiny_config();
    RmsProp a(net, RmsPropConfig{}), b(net, RmsPropConfig{});
    auto pa = zero_params(net);
    auto pb = zero_params(net);
    for (int it = 0; it < 20; ++it) {
        auto grads = zero_params(net);
        grads.w_e(0, 0) = 0.1 * (it + 1);
        grads.b_s(0, 0) = -0.05 * it;
        a.step(pa, grads);
        b.step(pb, grads);
    }
    for (auto& [name, mat] : pa.named()) {
        const Matrix* other = nullptr;
        for (auto& [bn, bm] : pb.named())
            if (bn == name) other = bm;
        CHECK(*mat == *other);
    }
}

TEST_CASE("gradient clipping caps the effective gradient") {
    auto net = tiny_config();
    RmsPropConfig cfg;
    cfg.grad_clip = 1.0;
    RmsProp clipped(net, cfg);
    RmsProp plain(net, RmsPropConfig{});

    auto p_clipped = zero_params(net);
    auto p_plain = zero_params(net);
    auto grads = zero_params(net);
    grads.b_e(0, 0) = 50.0;
    auto unit = zero_params(net);
    unit.b_e(0, 0) = 1.0;

    clipped.step(p_clipped, grads);
    plain.step(p_plain, unit);
    CHECK(p_clipped.b_e(0, 0) == doctest::Approx(p_plain.b_e(0, 0)).epsilon(1e-12));
}

TEST_CASE("non-finite gradients raise with the offending matrix named") {
    auto net = tiny_config();
    RmsProp opt(net, RmsPropConfig{});
    auto params = zero_params(net);
    auto grads = zero_params(net);
    grads.w_hf(0, 1) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_WITH_AS(opt.step(params, grads), doctest::Contains("w_hf"), DivergenceError);
}

TEST_CASE("shape mismatches raise") {
    auto net = tiny_config();
    RmsProp opt(net, RmsPropConfig{});
    auto other = net;
    other.lstm_units += 1;
    auto params = zero_params(other);
    auto grads = zero_params(other);
    CHECK_THROWS_AS(opt.step(params, grads), ShapeError);
}

TEST_CASE("accumulators never go negative") {
    auto net = tiny_config();
    RmsProp opt(net, RmsPropConfig{});
    auto params = zero_params(net);
    for (int it = 0; it < 30; ++it) {
        auto grads = zero_params(net);
        grads.w_xi(0, 0) = (it % 2 == 0) ? 3.0 : -3.0;
        opt.step(params, grads);
        for (auto& [name, mat] : opt.accumulators().named()) {
            for (std::size_t k = 0; k < mat->size(); ++k) CHECK(mat->data()[k] >= 0.0);
        }
    }
}

TEST_SUITE_END();
