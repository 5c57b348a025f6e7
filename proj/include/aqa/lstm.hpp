#pragma once

#include <span>
#include <vector>

#include "aqa/features.hpp"

namespace aqa {

// Gated recurrent cell over clip features. Packed parameter layout, gate
// row order [i; f; g; o]:
//   W: (4M x D)   input weights
//   U: (4M x M)   recurrent weights
//   b: (4M)       gate biases
// with i, f, o squashed by sigmoid and the candidate g by tanh:
//   c_t = f . c_{t-1} + i . g
//   h_t = o . tanh(c_t)
struct LstmWeights {
    std::span<const double> W;
    std::span<const double> U;
    std::span<const double> b;
    std::size_t input_dim = 0;   // D
    std::size_t hidden_dim = 0;  // M
};

struct LstmGrads {
    std::span<double> W;
    std::span<double> U;
    std::span<double> b;
};

struct LstmStepCache {
    std::vector<double> x, h_prev, c_prev;
    std::vector<double> i, f, g, o;
    std::vector<double> c, tanh_c, h;
};

struct LstmTrace {
    std::vector<LstmStepCache> steps;
    bool valid = false;

    const std::vector<double>& hidden_at(std::size_t step) const;  // 0-indexed
};

struct LstmState {
    std::vector<double> h;
    std::vector<double> c;
};

LstmState lstm_cell_forward(const LstmWeights& w, std::span<const double> x,
                            std::span<const double> h_prev, std::span<const double> c_prev,
                            LstmStepCache* cache = nullptr);

// Folds the cell over all clips from the zero state; returns the final
// hidden state. Fills per-step caches when a trace is supplied.
std::vector<double> lstm_sequence_forward(const LstmWeights& w,
                                          const ClipFeatureSequence& seq,
                                          LstmTrace* trace = nullptr);

// Backpropagation through time. d_h_final is the loss gradient at the
// final hidden state; parameter gradients are accumulated into grads.
void lstm_backward(const LstmWeights& w, const LstmTrace& trace,
                   std::span<const double> d_h_final, LstmGrads grads);

}  // namespace aqa
