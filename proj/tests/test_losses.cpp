#include <doctest.h>

#include <cmath>
#include <vector>

#include "mtnet/errors.hpp"
#include "mtnet/gradcheck.hpp"
#include "mtnet/losses.hpp"
#include "mtnet/rng.hpp"

using namespace mtnet;

namespace {

LossConfig make_config(int m) {
    LossConfig cfg;
    cfg.center = Matrix(m, 1);
    return cfg;
}

}  // namespace

TEST_SUITE_BEGIN("losses");

TEST_CASE("binary cross-entropy reference values") {
    auto l = bce(0.5, 1);
    CHECK(l.value == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(l.grad == doctest::Approx(-2.0).epsilon(1e-12));

    l = bce(0.5, 0);
    CHECK(l.value == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(l.grad == doctest::Approx(2.0).epsilon(1e-12));

    // a confident correct prediction costs almost nothing
    CHECK(bce(0.999, 1).value < 0.01);
    CHECK(bce(0.001, 0).value < 0.01);
}

TEST_CASE("binary cross-entropy clamps instead of overflowing") {
    auto l = bce(0.0, 1);
    CHECK(std::isfinite(l.value));
    CHECK(l.value == doctest::Approx(-std::log(1e-7)).epsilon(1e-9));
    CHECK(l.grad == doctest::Approx(-1e7).epsilon(1e-9));

    l = bce(1.0, 0);
    CHECK(std::isfinite(l.value));
    CHECK(l.grad == doctest::Approx(1e7).epsilon(1e-9));
}

TEST_CASE("binary cross-entropy gradient matches finite differences") {
    for (int y : {0, 1}) {
        for (double p : {0.2, 0.5, 0.8}) {
            Matrix x(1, 1, {p});
            Matrix analytic(1, 1, {bce(p, y).grad});
            auto f = [y](const Matrix& m) { return bce(m(0, 0), y).value; };
            CHECK(grad_check(f, x, analytic, 1e-6) < 1e-5);
        }
    }
}

TEST_CASE("deviation loss reference values") {
    auto cfg = make_config(4);

    // normals: plain absolute z-score
    auto l = deviation_loss(2.0, 0, cfg);
    CHECK(l.value == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(l.grad == doctest::Approx(1.0).epsilon(1e-12));

    l = deviation_loss(-1.5, 0, cfg);
    CHECK(l.value == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(l.grad == doctest::Approx(-1.0).epsilon(1e-12));

    CHECK(deviation_loss(0.0, 0, cfg).value == 0.0);
    CHECK(deviation_loss(0.0, 0, cfg).grad == 0.0);

    // positives: hinge up to the margin a = 5
    l = deviation_loss(2.0, 1, cfg);
    CHECK(l.value == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(l.grad == doctest::Approx(-1.0).epsilon(1e-12));

    l = deviation_loss(6.0, 1, cfg);
    CHECK(l.value == 0.0);
    CHECK(l.grad == 0.0);
}

TEST_CASE("deviation loss respects a non-standard prior") {
    auto cfg = make_config(4);
    cfg.prior_mu = 1.0;
    cfg.prior_sigma = 2.0;
    CHECK(deviation(5.0, cfg) == doctest::Approx(2.0).epsilon(1e-12));
    auto l = deviation_loss(5.0, 0, cfg);
    CHECK(l.value == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(l.grad == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("deviation loss gradient matches finite differences away from kinks") {
    auto cfg = make_config(4);
    for (auto [score, y] : std::vector<std::pair<double, int>>{
             {0.7, 0}, {-0.4, 0}, {2.0, 1}, {-3.0, 1}}) {
        Matrix x(1, 1, {score});
        Matrix analytic(1, 1, {deviation_loss(score, y, cfg).grad});
        auto f = [&cfg, y = y](const Matrix& m) { return deviation_loss(m(0, 0), y, cfg).value; };
        CHECK(grad_check(f, x, analytic, 1e-6) < 1e-5);
    }
}

TEST_CASE("one-class loss reference values") {
    auto cfg = make_config(2);

    // q sitting exactly on the center
    Matrix at_center(2, 1);
    auto l = oneclass_loss(at_center, 0, cfg);
    CHECK(l.value == 0.0);
    CHECK(l.grad == Matrix(2, 1));

    l = oneclass_loss(at_center, 1, cfg);
    CHECK(l.value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(l.grad == Matrix(2, 1));

    // a 3-4-5 right triangle away from the origin center
    Matrix q(2, 1, {3.0, 4.0});
    l = oneclass_loss(q, 0, cfg);
    CHECK(l.value == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(l.grad(0, 0) == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(l.grad(1, 0) == doctest::Approx(0.8).epsilon(1e-12));

    // positives beyond the margin are free
    l = oneclass_loss(q, 1, cfg);
    CHECK(l.value == 0.0);
    CHECK(l.grad == Matrix(2, 1));

    // positives inside the margin are pushed outward
    Matrix near(2, 1, {0.3, 0.4});
    l = oneclass_loss(near, 1, cfg);
    CHECK(l.value == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(l.grad(0, 0) == doctest::Approx(-0.6).epsilon(1e-12));
    CHECK(l.grad(1, 0) == doctest::Approx(-0.8).epsilon(1e-12));
}

TEST_CASE("one-class loss gradient matches finite differences") {
    auto cfg = make_config(5);
    Rng rng(91);
    for (int k = 0; k < cfg.center.rows(); ++k) cfg.center.data()[k] = rng.normal();
    for (int y : {0, 1}) {
        for (int trial = 0; trial < 5; ++trial) {
            Matrix q(5, 1);
            for (int k = 0; k < 5; ++k) q.data()[k] = cfg.center(k, 0) + 0.4 * rng.normal();
            const double d = oneclass_loss(q, 0, cfg).value;
            if (d < 0.05 || std::fabs(d - cfg.m_margin) < 0.05) continue;
            Matrix analytic = oneclass_loss(q, y, cfg).grad;
            auto f = [&](const Matrix& m) { return oneclass_loss(m, y, cfg).value; };
            CHECK(grad_check(f, q, analytic, 1e-6) < 1e-5);
        }
    }
}

TEST_CASE("one-class loss rejects a feature/center shape mismatch") {
    auto cfg = make_config(3);
    CHECK_THROWS_AS(oneclass_loss(Matrix(4, 1), 0, cfg), ShapeError);
}

TEST_CASE("labels outside {0,1} are rejected") {
    auto cfg = make_config(2);
    CHECK_THROWS_AS(bce(0.5, 2), ParameterError);
    CHECK_THROWS_AS(deviation_loss(0.5, -1, cfg), ParameterError);
    CHECK_THROWS_AS(oneclass_loss(Matrix(2, 1), 3, cfg), ParameterError);
}

TEST_CASE("config validation") {
    auto cfg = make_config(2);
    CHECK_NOTHROW(cfg.validate());
    cfg.prior_sigma = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ParameterError);
    cfg = make_config(2);
    cfg.alpha = -0.1;
    CHECK_THROWS_AS(cfg.validate(), ParameterError);
    cfg = make_config(2);
    cfg.center = Matrix(2, 2);
    CHECK_THROWS_AS(cfg.validate(), ShapeError);
}

namespace {

std::pair<std::vector<SampleOutput>, std::vector<int>> random_batch(int n, int m, Rng& rng) {
    std::vector<SampleOutput> outputs;
    std::vector<int> labels;
    for (int i = 0; i < n; ++i) {
        SampleOutput s;
        s.q = Matrix(m, 1);
        for (int k = 0; k < m; ++k) s.q.data()[k] = 2.0 * rng.normal();
        s.p = 0.2 + 0.6 * rng.uniform01();
        s.score = 3.0 * rng.normal();
        outputs.push_back(std::move(s));
        labels.push_back(static_cast<int>(rng.below(2)));
    }
    return {std::move(outputs), std::move(labels)};
}

}  // namespace

TEST_CASE("batch loss equals the mean of per-sample terms") {
    Rng rng(417);
    auto cfg = make_config(3);
    for (int k = 0; k < 3; ++k) cfg.center.data()[k] = rng.normal();
    auto [outputs, labels] = random_batch(7, 3, rng);
    auto bundle = total_batch_loss(outputs, labels, cfg);

    double le = 0.0, la = 0.0, lo = 0.0;
    for (std::size_t i = 0; i < outputs.size(); ++i) {
        le += bce(outputs[i].p, labels[i]).value;
        la += deviation_loss(outputs[i].score, labels[i], cfg).value;
        lo += oneclass_loss(outputs[i].q, labels[i], cfg).value;
    }
    le /= 7.0;
    la /= 7.0;
    lo /= 7.0;
    CHECK(bundle.l_e == doctest::Approx(le).epsilon(1e-12));
    CHECK(bundle.l_a == doctest::Approx(la).epsilon(1e-12));
    CHECK(bundle.l_o == doctest::Approx(lo).epsilon(1e-12));
    CHECK(bundle.total ==
          doctest::Approx(bundle.l_e + cfg.alpha * bundle.l_a + cfg.beta * bundle.l_o)
              .epsilon(1e-12));

    // upstream gradients carry the loss weights and the 1/|B| factor
    for (std::size_t i = 0; i < outputs.size(); ++i) {
        CHECK(bundle.d_p[i] ==
              doctest::Approx(bce(outputs[i].p, labels[i]).grad / 7.0).epsilon(1e-12));
        CHECK(bundle.d_score[i] ==
              doctest::Approx(cfg.alpha * deviation_loss(outputs[i].score, labels[i], cfg).grad /
                              7.0)
                  .epsilon(1e-12));
        Matrix expect = scale(oneclass_loss(outputs[i].q, labels[i], cfg).grad, cfg.beta / 7.0);
        for (int k = 0; k < 3; ++k) {
            CHECK(bundle.d_q[i](k, 0) == doctest::Approx(expect(k, 0)).epsilon(1e-12));
        }
    }
}

TEST_CASE("zero weights reduce the objective to plain cross-entropy") {
    Rng rng(98);
    auto cfg = make_config(3);
    cfg.alpha = 0.0;
    cfg.beta = 0.0;
    auto [outputs, labels] = random_batch(9, 3, rng);
    auto bundle = total_batch_loss(outputs, labels, cfg);

    double le = 0.0;
    for (std::size_t i = 0; i < outputs.size(); ++i) le += bce(outputs[i].p, labels[i]).value;
    CHECK(bundle.total == doctest::Approx(le / 9.0).epsilon(1e-12));
    CHECK(bundle.l_a == 0.0);
    CHECK(bundle.l_o == 0.0);
    for (std::size_t i = 0; i < outputs.size(); ++i) {
        CHECK(bundle.d_score[i] == 0.0);
        CHECK(bundle.d_q[i] == Matrix(3, 1));
    }
}

TEST_CASE("auxiliary weights scale their gradients but not the recorded means") {
    Rng rng(555);
    auto cfg = make_config(3);
    auto [outputs, labels] = random_batch(6, 3, rng);
    auto base = total_batch_loss(outputs, labels, cfg);

    auto heavy = cfg;
    heavy.alpha = 2.0 * cfg.alpha;
    heavy.beta = 2.0 * cfg.beta;
    auto bundle = total_batch_loss(outputs, labels, heavy);

    CHECK(bundle.l_a == doctest::Approx(base.l_a).epsilon(1e-12));
    CHECK(bundle.l_o == doctest::Approx(base.l_o).epsilon(1e-12));
    CHECK(bundle.total == doctest::Approx(base.l_e + 2.0 * cfg.alpha * base.l_a +
                                          2.0 * cfg.beta * base.l_o)
                              .epsilon(1e-12));
    for (std::size_t i = 0; i < outputs.size(); ++i) {
        CHECK(bundle.d_score[i] == doctest::Approx(2.0 * base.d_score[i]).epsilon(1e-12));
    }
}

TEST_CASE("upstream gradients are the exact partials of the batch total") {
    // Flatten (p_i, score_i, q_i) for a small batch into one parameter
    // matrix and compare the assembled gradients against finite
    // differences of the scalar total.
    Rng rng(7211);
    const int n = 3, m = 4;
    auto cfg = make_config(m);
    for (int k = 0; k < m; ++k) cfg.center.data()[k] = 0.3 * rng.normal();

    std::vector<int> labels = {0, 1, 0};
    Matrix params(n, 2 + m);
    for (int i = 0; i < n; ++i) {
        params(i, 0) = 0.25 + 0.5 * rng.uniform01();
        params(i, 1) = (labels[i] == 1) ? 1.5 : 0.8;  // clear of both hinge kinks
        for (int k = 0; k < m; ++k) params(i, 2 + k) = cfg.center(k, 0) + 3.0 + rng.normal();
    }

    auto unpack = [&](const Matrix& x) {
        std::vector<SampleOutput> outputs;
        for (int i = 0; i < n; ++i) {
            SampleOutput s;
            s.p = x(i, 0);
            s.score = x(i, 1);
            s.q = Matrix(m, 1);
            for (int k = 0; k < m; ++k) s.q.data()[k] = x(i, 2 + k);
            outputs.push_back(std::move(s));
        }
        return outputs;
    };

    auto bundle = total_batch_loss(unpack(params), labels, cfg);
    Matrix analytic(n, 2 + m);
    for (int i = 0; i < n; ++i) {
        analytic(i, 0) = bundle.d_p[i];
        analytic(i, 1) = bundle.d_score[i];
        for (int k = 0; k < m; ++k) analytic(i, 2 + k) = bundle.d_q[i](k, 0);
    }

    auto f = [&](const Matrix& x) { return total_batch_loss(unpack(x), labels, cfg).total; };
    CHECK(grad_check(f, params, analytic, 1e-6) < 1e-6);
}

TEST_CASE("batch loss input validation") {
    auto cfg = make_config(2);
    CHECK_THROWS_AS(total_batch_loss({}, {}, cfg), DataError);

    SampleOutput s;
    s.q = Matrix(2, 1);
    s.p = 0.5;
    s.score = 0.0;
    CHECK_THROWS_AS(total_batch_loss({s}, {0, 1}, cfg), DataError);
}

TEST_SUITE_END();
