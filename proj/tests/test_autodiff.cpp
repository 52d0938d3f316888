#include <doctest.h>

#include "cir/autodiff/adam.hpp"
#include "cir/autodiff/grad_check.hpp"
#include "cir/autodiff/node.hpp"
#include "cir/autodiff/ops.hpp"

#include <cmath>
#include <random>

using namespace cir::ad;

namespace {

Mat colvec(std::initializer_list<double> vals) {
    Mat m(static_cast<long>(vals.size()), 1);
    long i = 0;
    for (double v : vals) {
        m(i++, 0) = v;
    }
    return m;
}

Mat random_mat(long r, long c, std::mt19937_64& rng, double scale = 1.0) {
    std::normal_distribution<double> dist(0.0, scale);
    Mat m(r, c);
    for (long i = 0; i < m.size(); ++i) {
        m.data()[i] = dist(rng);
    }
    return m;
}

} // namespace

TEST_CASE("linear: forward examples") {
    auto x = constant(colvec({1, 0}));
    auto W = parameter(Mat::Identity(2, 2), "W");
    auto b = parameter(Mat::Zero(2, 1), "b");
    auto y = linear(W, b, x);
    CHECK(y->value(0, 0) == doctest::Approx(1.0));
    CHECK(y->value(1, 0) == doctest::Approx(0.0));

    Mat W2(1, 2);
    W2 << 1, 1;
    auto y2 = linear(parameter(W2, "W2"), parameter(colvec({0.5}), "b2"),
                     constant(colvec({1, 2})));
    CHECK(y2->value(0, 0) == doctest::Approx(3.5));
}

TEST_CASE("linear: shape mismatch names both shapes") {
    auto W = parameter(Mat::Zero(2, 3), "W");
    auto x = constant(Mat::Zero(2, 1));
    CHECK_THROWS_WITH_AS(linear(W, nullptr, x), doctest::Contains("2x3"),
                         std::invalid_argument);
}

TEST_CASE("linear: gradient matches central differences") {
    std::mt19937_64 rng(7);
    auto W = parameter(random_mat(3, 4, rng), "W");
    auto b = parameter(random_mat(3, 1, rng), "b");
    Mat xv = random_mat(4, 1, rng);
    auto res = grad_check([&] { return sum(linear(W, b, constant(xv))); }, {W, b});
    CHECK(res.max_rel_err < 1e-6);
}

TEST_CASE("tanh: zeros, odd symmetry, open range") {
    auto z = tanh_act(constant(colvec({0, 0, 0})));
    CHECK(z->value.cwiseAbs().maxCoeff() == 0.0);

    std::mt19937_64 rng(3);
    Mat xv = random_mat(16, 1, rng, 3.0);
    auto pos = tanh_act(constant(xv));
    auto neg = tanh_act(constant(-xv));
    CHECK((pos->value + neg->value).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
    CHECK(pos->value.cwiseAbs().maxCoeff() < 1.0);

    Mat big = colvec({1e6, -1e6, 40.0});
    auto sat = tanh_act(constant(big));
    CHECK(sat->value.cwiseAbs().maxCoeff() <= 1.0);
}

TEST_CASE("layer_norm: forward examples") {
    auto c = layer_norm(constant(colvec({5, 5, 5, 5})), nullptr, nullptr);
    CHECK(c->value.cwiseAbs().maxCoeff() == doctest::Approx(0.0));

    auto y = layer_norm(constant(colvec({1, -1})), nullptr, nullptr);
    CHECK(y->value(0, 0) == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(y->value(1, 0) == doctest::Approx(-1.0).epsilon(1e-4));

    CHECK_THROWS_AS(layer_norm(constant(colvec({1})), nullptr, nullptr),
                    std::invalid_argument);
}

TEST_CASE("layer_norm: pre-scale output is standardized") {
    std::mt19937_64 rng(11);
    // Input variance well above eps_ln, so standardization is tight.
    Mat xv = random_mat(32, 4, rng, 8.0);
    auto y = layer_norm(constant(xv), nullptr, nullptr);
    for (long j = 0; j < y->value.cols(); ++j) {
        const double m = y->value.col(j).mean();
        const double var = (y->value.col(j).array() - m).square().mean();
        CHECK(std::abs(m) < 1e-9);
        CHECK(std::abs(var - 1.0) < 1e-6);
    }
}

TEST_CASE("layer_norm: gradient vs finite differences") {
    std::mt19937_64 rng(13);
    auto x = parameter(random_mat(6, 1, rng), "x");
    auto gain = parameter(Mat::Ones(6, 1), "gain");
    auto bias = parameter(Mat::Zero(6, 1), "bias");
    Mat w = random_mat(1, 6, rng);
    auto res = grad_check(
        [&] { return sum(mul(constant(w.transpose()), layer_norm(x, gain, bias))); },
        {x, gain, bias});
    CHECK(res.max_rel_err < 1e-5);
}

TEST_CASE("avg_rnorm: hand example from the definition") {
    auto y = avg_rnorm(constant(colvec({1, -1, 2, -2})), 0.1);
    CHECK(y->value(0, 0) == doctest::Approx(1.0 / 15.0).epsilon(1e-12));
    CHECK(y->value(1, 0) == doctest::Approx(-1.0 / 15.0).epsilon(1e-12));
    CHECK(y->value(2, 0) == doctest::Approx(2.0 / 15.0).epsilon(1e-12));
    CHECK(y->value(3, 0) == doctest::Approx(-2.0 / 15.0).epsilon(1e-12));
}

TEST_CASE("avg_rnorm: constants cancel and positive-scale invariance") {
    for (double k : {0.5, 1.0, 7.25}) {
        auto y = avg_rnorm(constant(colvec({k, k, k, k})), 0.1);
        CHECK((y->value.array() - 0.1).abs().maxCoeff() < 1e-15);
    }
    std::mt19937_64 rng(5);
    Mat xv = random_mat(8, 1, rng);
    for (double k : {0.5, 2.0, 100.0}) {
        auto a = avg_rnorm(constant(xv), 0.1);
        auto b = avg_rnorm(constant(k * xv), 0.1);
        CHECK((a->value - b->value).cwiseAbs().maxCoeff() < 1e-14);
    }
}

TEST_CASE("avg_rnorm: output magnitude mean equals c; guard handles zeros") {
    std::mt19937_64 rng(17);
    for (int rep = 0; rep < 20; ++rep) {
        Mat xv = random_mat(10, 1, rng, 4.0);
        auto y = avg_rnorm(constant(xv), 0.1);
        CHECK(std::abs(y->value.cwiseAbs().mean() - 0.1) < 1e-12);
    }
    auto z = avg_rnorm(constant(colvec({0, 0, 0})), 0.1);
    CHECK(z->value.allFinite());
    CHECK(z->value.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("avg_rnorm: gradient vs finite differences away from guard") {
    std::mt19937_64 rng(19);
    auto x = parameter(random_mat(6, 1, rng), "x");
    Mat w = random_mat(6, 1, rng);
    auto res = grad_check([&] { return sum(mul(constant(w), avg_rnorm(x, 0.1))); }, {x});
    CHECK(res.max_rel_err < 1e-5);
}

TEST_CASE("elu, sigmoid, softmax: definitions") {
    auto e = elu_act(constant(colvec({0, 1.5, -1.0})));
    CHECK(e->value(0, 0) == 0.0);
    CHECK(e->value(1, 0) == 1.5);
    CHECK(e->value(2, 0) == doctest::Approx(std::expm1(-1.0)));

    auto s = sigmoid_act(constant(colvec({0})));
    CHECK(s->value(0, 0) == doctest::Approx(0.5));

    auto sm = softmax_act(constant(colvec({3, 3, 3, 3})));
    CHECK((sm->value.array() - 0.25).abs().maxCoeff() < 1e-15);

    std::mt19937_64 rng(23);
    auto sm2 = softmax_act(constant(random_mat(5, 3, rng, 2.0)));
    for (long j = 0; j < 3; ++j) {
        CHECK(sm2->value.col(j).sum() == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("backward: sum and dot") {
    std::mt19937_64 rng(29);
    auto x = parameter(random_mat(5, 1, rng), "x");
    backward(sum(x));
    CHECK((x->grad.array() - 1.0).abs().maxCoeff() == 0.0);

    x->zero_grad();
    backward(sum(mul(x, x)));
    CHECK((x->grad - 2.0 * x->value).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("backward: diamond graph sums both paths") {
    std::mt19937_64 rng(31);
    auto x = parameter(random_mat(4, 1, rng), "x");
    auto res = grad_check(
        [&] {
            auto a = tanh_act(x);
            auto b = sigmoid_act(x);
            return sum(mul(a, b));
        },
        {x});
    CHECK(res.max_rel_err < 1e-6);
}

TEST_CASE("backward: contract violations and accumulation") {
    auto x = parameter(Mat::Ones(3, 1), "x");
    CHECK_THROWS_AS(backward(tanh_act(x)), std::invalid_argument);

    x->zero_grad();
    auto loss = sum(x);
    backward(loss);
    backward(loss); // accumulates by contract
    CHECK((x->grad.array() - 2.0).abs().maxCoeff() == 0.0);
}

TEST_CASE("backward: unreachable parameters keep zero grads") {
    auto x = parameter(Mat::Ones(3, 1), "x");
    auto y = parameter(Mat::Ones(3, 1), "y");
    backward(sum(tanh_act(x)));
    CHECK(y->grad.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("backward: deterministic, bitwise-identical across runs") {
    std::mt19937_64 rng(37);
    Mat xv = random_mat(16, 1, rng);
    Mat wv = random_mat(16, 16, rng);
    auto run = [&]() {
        auto x = parameter(xv, "x");
        auto W = parameter(wv, "W");
        auto h = tanh_act(linear(W, nullptr, x));
        auto l = layer_norm(h, nullptr, nullptr);
        backward(mean(mul(l, avg_rnorm(x, 0.1))));
        return std::pair<Mat, Mat>(x->grad, W->grad);
    };
    auto [gx1, gw1] = run();
    auto [gx2, gw2] = run();
    CHECK(gx1 == gx2);
    CHECK(gw1 == gw2);
}

TEST_CASE("no-grad mode skips graph construction") {
    auto x = parameter(Mat::Ones(3, 1), "x");
    NodePtr y;
    {
        NoGradGuard ng;
        y = tanh_act(x);
    }
    CHECK(y->parents.empty());
    CHECK_FALSE(y->requires_grad);
}

TEST_CASE("adam: zero gradient leaves parameters unchanged") {
    auto p = parameter(Mat::Ones(4, 1), "p");
    Adam opt({p});
    Mat before = p->value;
    for (int i = 0; i < 10; ++i) {
        opt.step(1e-3);
    }
    CHECK(p->value == before);
    CHECK(opt.state().step_count == 10);
}

TEST_CASE("adam: first step from fresh state has magnitude lr") {
    auto p = parameter(Mat::Zero(3, 1), "p");
    Adam opt({p});
    p->grad = colvec({0.5, -2.0, 1e-3});
    const double lr = 3e-4;
    opt.step(lr);
    for (long i = 0; i < 3; ++i) {
        const double g = (i == 0) ? 0.5 : (i == 1 ? -2.0 : 1e-3);
        const double expected = -lr * g / (std::abs(g) + 1e-8);
        CHECK(p->value(i, 0) == doctest::Approx(expected).epsilon(1e-9));
    }
}

TEST_CASE("adam: constant gradient drives updates to -lr*sign(g)") {
    auto p = parameter(Mat::Zero(2, 1), "p");
    Adam opt({p});
    Mat g = colvec({0.7, -0.02});
    const double lr = 1e-3;
    double prev0 = 0, prev1 = 0;
    for (int i = 0; i < 500; ++i) {
        prev0 = p->value(0, 0);
        prev1 = p->value(1, 0);
        p->grad = g;
        opt.step(lr);
    }
    CHECK(p->value(0, 0) - prev0 == doctest::Approx(-lr).epsilon(1e-6));
    CHECK(p->value(1, 0) - prev1 == doctest::Approx(lr).epsilon(1e-6));
}

TEST_CASE("adam: NaN gradient aborts naming the parameter") {
    auto p = parameter(Mat::Zero(2, 1), "actor.mean_head.W");
    Adam opt({p});
    p->grad(0, 0) = std::nan("");
    CHECK_THROWS_WITH_AS(opt.step(1e-3), doctest::Contains("actor.mean_head.W"),
                         std::runtime_error);
}

TEST_CASE("grad_check: every primitive under 1e-4 at random points") {
    std::mt19937_64 rng(41);
    double worst = 0.0;
    for (int rep = 0; rep < 25; ++rep) {
        auto x = parameter(random_mat(6, 1, rng), "x");
        Mat w = random_mat(6, 1, rng);
        auto weighted = [&](auto&& op) {
            return grad_check([&] { return sum(mul(constant(w), op(x))); }, {x}).max_rel_err;
        };
        worst = std::max(worst, weighted([](const NodePtr& v) { return tanh_act(v); }));
        worst = std::max(worst, weighted([](const NodePtr& v) { return sigmoid_act(v); }));
        worst = std::max(worst, weighted([](const NodePtr& v) { return elu_act(v); }));
        worst = std::max(worst, weighted([](const NodePtr& v) { return softplus_act(v); }));
        worst = std::max(worst, weighted([](const NodePtr& v) { return exp_act(v); }));
        worst = std::max(worst, weighted([](const NodePtr& v) { return square(v); }));
        worst = std::max(worst, weighted([](const NodePtr& v) { return softmax_act(v); }));
        worst = std::max(worst, weighted([](const NodePtr& v) {
            return layer_norm(v, nullptr, nullptr);
        }));
        worst = std::max(worst, weighted([](const NodePtr& v) { return avg_rnorm(v, 0.1); }));
    }
    CHECK(worst < 1e-4);
}

TEST_CASE("ops: reductions, concat, clamp backward") {
    std::mt19937_64 rng(43);
    auto a = parameter(random_mat(3, 4, rng), "a");
    auto b = parameter(random_mat(2, 4, rng), "b");
    auto res = grad_check(
        [&] {
            auto cat = concat_rows(a, b);
            auto cs = col_sum(square(cat));
            return mean(clamp(cs, -0.5, 0.5));
        },
        {a, b});
    CHECK(res.max_rel_err < 1e-5);
}
