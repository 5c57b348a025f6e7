#include "aqa/numeric.hpp"

#include <atomic>
#include <cmath>
#include <iostream>
#include <string>

#include "aqa/errors.hpp"

namespace aqa {

namespace {
std::atomic<std::uint64_t> g_bce_clamps{0};
}

Activation activation_from_string(std::string_view s) {
    if (s == "identity") return Activation::Identity;
    if (s == "relu") return Activation::Relu;
    if (s == "sigmoid") return Activation::Sigmoid;
    if (s == "tanh") return Activation::Tanh;
    throw ConfigError("unknown activation: " + std::string(s));
}

std::string_view activation_name(Activation a) {
    switch (a) {
        case Activation::Identity: return "identity";
        case Activation::Relu: return "relu";
        case Activation::Sigmoid: return "sigmoid";
        case Activation::Tanh: return "tanh";
    }
    return "identity";
}

double apply_activation(Activation a, double x) {
    switch (a) {
        case Activation::Identity: return x;
        case Activation::Relu: return x > 0 ? x : 0.0;
        case Activation::Sigmoid: return sigmoid(x);
        case Activation::Tanh: return std::tanh(x);
    }
    return x;
}

double activation_derivative(Activation a, double pre) {
    switch (a) {
        case Activation::Identity: return 1.0;
        case Activation::Relu: return pre > 0 ? 1.0 : 0.0;
        case Activation::Sigmoid: {
            double s = sigmoid(pre);
            return s * (1.0 - s);
        }
        case Activation::Tanh: {
            double t = std::tanh(pre);
            return 1.0 - t * t;
        }
    }
    return 1.0;
}

void matvec(std::span<const double> W, std::span<const double> x,
            std::span<double> y, std::size_t rows, std::size_t cols) {
    for (std::size_t r = 0; r < rows; ++r) {
        const double* row = W.data() + r * cols;
        double acc = 0.0;
        for (std::size_t c = 0; c < cols; ++c) acc += row[c] * x[c];
        y[r] = acc;
    }
}

void matvec_transposed(std::span<const double> W, std::span<const double> x,
                       std::span<double> y, std::size_t rows, std::size_t cols) {
    std::fill(y.begin(), y.end(), 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
        const double* row = W.data() + r * cols;
        double xr = x[r];
        for (std::size_t c = 0; c < cols; ++c) y[c] += row[c] * xr;
    }
}

void outer_accumulate(std::span<double> W, std::span<const double> a,
                      std::span<const double> b) {
    for (std::size_t r = 0; r < a.size(); ++r) {
        double* row = W.data() + r * b.size();
        double ar = a[r];
        for (std::size_t c = 0; c < b.size(); ++c) row[c] += ar * b[c];
    }
}

std::vector<double> dense_forward(std::span<const double> W, std::span<const double> b,
                                  std::span<const double> x, std::size_t out_dim,
                                  std::size_t in_dim, Activation act, DenseCache* cache) {
    if (W.size() != out_dim * in_dim)
        throw ShapeError("dense_forward: weight storage " + std::to_string(W.size()) +
                         " != " + std::to_string(out_dim) + "x" + std::to_string(in_dim));
    if (b.size() != out_dim)
        throw ShapeError("dense_forward: bias length " + std::to_string(b.size()) +
                         " != out dim " + std::to_string(out_dim));
    if (x.size() != in_dim)
        throw ShapeError("dense_forward: input length " + std::to_string(x.size()) +
                         " != in dim " + std::to_string(in_dim));

    std::vector<double> pre(out_dim);
    matvec(W, x, pre, out_dim, in_dim);
    for (std::size_t r = 0; r < out_dim; ++r) pre[r] += b[r];

    std::vector<double> y(out_dim);
    for (std::size_t r = 0; r < out_dim; ++r) y[r] = apply_activation(act, pre[r]);

    if (cache) {
        cache->input.assign(x.begin(), x.end());
        cache->pre = std::move(pre);
    }
    return y;
}

void dense_backward(std::span<const double> W, const DenseCache& cache,
                    std::span<const double> dy, std::size_t out_dim, std::size_t in_dim,
                    Activation act, std::span<double> dW, std::span<double> db,
                    std::vector<double>* dx) {
    if (cache.pre.size() != out_dim || cache.input.size() != in_dim)
        throw StateError("dense_backward: cache does not match layer dimensions");
    if (dy.size() != out_dim)
        throw ShapeError("dense_backward: gradient length mismatch");

    std::vector<double> dpre(out_dim);
    for (std::size_t r = 0; r < out_dim; ++r)
        dpre[r] = dy[r] * activation_derivative(act, cache.pre[r]);

    outer_accumulate(dW, dpre, cache.input);
    for (std::size_t r = 0; r < out_dim; ++r) db[r] += dpre[r];

    if (dx) {
        dx->assign(in_dim, 0.0);
        matvec_transposed(W, dpre, *dx, out_dim, in_dim);
    }
}

LossValue bce_loss(double p, int label) {
    constexpr double kEps = 1e-12;
    if (p <= 0.0 || p >= 1.0) {
        if (g_bce_clamps.fetch_add(1) == 0)
            std::cerr << "bce_loss: probability " << p << " clamped into (0,1)\n";
        p = p < kEps ? kEps : (p > 1.0 - kEps ? 1.0 - kEps : p);
    }
    double loss = label == 1 ? -std::log(p) : -std::log(1.0 - p);
    double grad = label == 1 ? -1.0 / p : 1.0 / (1.0 - p);
    return {loss, grad};
}

LossValue mse_loss(double pred, double target) {
    double d = pred - target;
    return {d * d, 2.0 * d};
}

std::uint64_t bce_clamp_count() { return g_bce_clamps.load(); }

}  // namespace aqa
