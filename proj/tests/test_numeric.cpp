#include <cmath>

#include "aqa/errors.hpp"
#include "aqa/numeric.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace aqa;

TEST_CASE("dense forward: identity weights pass the input through") {
    std::vector<double> W = {1, 0, 0, 1};
    std::vector<double> b = {0, 0};
    std::vector<double> x = {3, -1};
    auto y = dense_forward(W, b, x, 2, 2, Activation::Identity);
    CHECK(y[0] == 3.0);
    CHECK(y[1] == -1.0);
}

TEST_CASE("dense forward: zero weights and sigmoid give 0.5 everywhere") {
    std::vector<double> W(3 * 4, 0.0);
    std::vector<double> b(3, 0.0);
    auto x = testutil::random_vector(11, 4);
    auto y = dense_forward(W, b, x, 3, 4, Activation::Sigmoid);
    for (double v : y) CHECK(v == 0.5);
}

TEST_CASE("dense forward matches an independent matrix-multiply oracle") {
    const std::size_t out = 7, in = 5;
    auto W = testutil::random_vector(21, out * in);
    auto b = testutil::random_vector(22, out);
    auto x = testutil::random_vector(23, in);

    auto y = dense_forward(W, b, x, out, in, Activation::Relu);

    for (std::size_t r = 0; r < out; ++r) {
        double acc = b[r];
        for (std::size_t c = 0; c < in; ++c) acc += W[r * in + c] * x[c];
        double expect = acc > 0 ? acc : 0.0;
        CHECK(std::abs(y[r] - expect) < 1e-12);
    }
}

TEST_CASE("dense forward rejects dimension mismatches") {
    std::vector<double> W(6, 0.0), b(2, 0.0), x(4, 0.0);
    CHECK_THROWS_AS(dense_forward(W, b, x, 2, 3, Activation::Identity), ShapeError);
    std::vector<double> x3(3, 0.0), b_bad(3, 0.0);
    CHECK_THROWS_AS(dense_forward(W, b_bad, x3, 2, 3, Activation::Identity), ShapeError);
}

TEST_CASE("dense backward matches central finite differences") {
    const std::size_t out = 4, in = 6;
    const double eps = 1e-6;
    auto W = testutil::random_vector(31, out * in);
    auto b = testutil::random_vector(32, out);
    auto x = testutil::random_vector(33, in);
    auto dy = testutil::random_vector(34, out);

    for (Activation act : {Activation::Identity, Activation::Sigmoid, Activation::Tanh}) {
        CAPTURE(static_cast<int>(act));
        auto loss = [&](const std::vector<double>& Wv, const std::vector<double>& bv,
                        const std::vector<double>& xv) {
            auto y = dense_forward(Wv, bv, xv, out, in, act);
            double acc = 0.0;
            for (std::size_t r = 0; r < out; ++r) acc += dy[r] * y[r];
            return acc;
        };

        DenseCache cache;
        dense_forward(W, b, x, out, in, act, &cache);
        std::vector<double> dW(out * in, 0.0), db(out, 0.0), dx;
        dense_backward(W, cache, dy, out, in, act, dW, db, &dx);

        for (std::size_t k = 0; k < W.size(); ++k) {
            auto Wp = W, Wm = W;
            Wp[k] += eps;
            Wm[k] -= eps;
            double numeric = (loss(Wp, b, x) - loss(Wm, b, x)) / (2 * eps);
            CHECK(std::abs(dW[k] - numeric) < 1e-7);
        }
        for (std::size_t k = 0; k < x.size(); ++k) {
            auto xp = x, xm = x;
            xp[k] += eps;
            xm[k] -= eps;
            double numeric = (loss(W, b, xp) - loss(W, b, xm)) / (2 * eps);
            CHECK(std::abs(dx[k] - numeric) < 1e-7);
        }
    }
}

TEST_CASE("bce loss value and gradient") {
    auto lv = bce_loss(0.5, 1);
    CHECK(std::abs(lv.loss - std::log(2.0)) < 1e-12);

    // gradient against finite differences
    for (double p : {0.2, 0.5, 0.8}) {
        for (int label : {0, 1}) {
            const double eps = 1e-7;
            auto g = bce_loss(p, label).grad;
            double numeric = (bce_loss(p + eps, label).loss - bce_loss(p - eps, label).loss) /
                             (2 * eps);
            CHECK(std::abs(g - numeric) < 1e-8);
        }
    }
}

TEST_CASE("bce loss clamps probabilities outside (0,1) and counts it") {
    std::uint64_t before = bce_clamp_count();
    auto lv = bce_loss(1.0, 1);
    CHECK(bce_clamp_count() == before + 1);
    CHECK(std::isfinite(lv.loss));
    CHECK(lv.loss < 1e-11);  // -log(1 - 1e-12)
    auto lv0 = bce_loss(0.0, 1);
    CHECK(bce_clamp_count() == before + 2);
    CHECK(lv0.loss > 20.0);  // -log(1e-12)
}

TEST_CASE("mse loss: zero at the target, exact gradient") {
    auto at_target = mse_loss(7.25, 7.25);
    CHECK(at_target.loss == 0.0);
    CHECK(at_target.grad == 0.0);

    auto lv = mse_loss(3.0, 10.0);
    CHECK(lv.loss == 49.0);
    CHECK(lv.grad == -14.0);
}
