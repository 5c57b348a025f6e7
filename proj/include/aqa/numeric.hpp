#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace aqa {

enum class Activation { Identity, Relu, Sigmoid, Tanh };

Activation activation_from_string(std::string_view s);
std::string_view activation_name(Activation a);

double apply_activation(Activation a, double x);
// Derivative expressed in terms of the pre-activation value.
double activation_derivative(Activation a, double pre);

inline double sigmoid(double x) {
    if (x >= 0) {
        double e = std::exp(-x);
        return 1.0 / (1.0 + e);
    }
    double e = std::exp(x);
    return e / (1.0 + e);
}

// y = W x, W row-major (rows x cols), x length cols.
void matvec(std::span<const double> W, std::span<const double> x,
            std::span<double> y, std::size_t rows, std::size_t cols);

// y = W^T x, W row-major (rows x cols), x length rows, y length cols.
void matvec_transposed(std::span<const double> W, std::span<const double> x,
                       std::span<double> y, std::size_t rows, std::size_t cols);

// W += a b^T (outer product accumulate), W row-major (|a| x |b|).
void outer_accumulate(std::span<double> W, std::span<const double> a,
                      std::span<const double> b);

// Activations of one forward pass, kept for the matching backward call.
struct DenseCache {
    std::vector<double> input;
    std::vector<double> pre;  // W x + b, before the nonlinearity
};

// activation(W x + b). W is (out x in) row-major. Caches the
// pre-activation when a cache is supplied.
std::vector<double> dense_forward(std::span<const double> W, std::span<const double> b,
                                  std::span<const double> x, std::size_t out_dim,
                                  std::size_t in_dim, Activation act,
                                  DenseCache* cache = nullptr);

// Accumulates dW, db; writes dx when non-null. dy is the gradient at the
// layer output.
void dense_backward(std::span<const double> W, const DenseCache& cache,
                    std::span<const double> dy, std::size_t out_dim, std::size_t in_dim,
                    Activation act, std::span<double> dW, std::span<double> db,
                    std::vector<double>* dx);

struct LossValue {
    double loss;
    double grad;  // d loss / d prediction
};

// Binary cross-entropy on a probability. Inputs outside (0,1) are clamped
// to [1e-12, 1-1e-12]; clamp events are counted (see bce_clamp_count).
LossValue bce_loss(double p, int label);

// Squared error (S - S')^2 with gradient w.r.t. the prediction.
LossValue mse_loss(double pred, double target);

// Number of bce_loss calls that had to clamp so far in this process.
std::uint64_t bce_clamp_count();

}  // namespace aqa
