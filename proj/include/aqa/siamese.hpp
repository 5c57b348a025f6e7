#pragma once

#include <cstdint>
#include <vector>

#include "aqa/features.hpp"
#include "aqa/lstm.hpp"
#include "aqa/numeric.hpp"
#include "aqa/params.hpp"

namespace aqa {

// Twin recurrent encoders with a shared weight copy, concatenated
// embeddings, two dense layers and a sigmoid match output:
//   O_p, O_q = encoder(seq_p), encoder(seq_q)      (each R^M)
//   X = [O_p | O_q]                                (R^2M)
//   Y = act(D1 X), Z = act(D2 Y)                   (R^128, R^64)
//   p = sigmoid(w_out . Z + b_out)
struct SiameseConfig {
    std::size_t feature_dim = 4096;  // D
    std::size_t embed_dim = 256;     // M
    Activation dense_activation = Activation::Relu;

    static constexpr std::size_t kHidden1 = 128;
    static constexpr std::size_t kHidden2 = 64;
};

// Forward activations of one pair, consumed by backward().
struct SiameseTrace {
    LstmTrace enc_p, enc_q;
    DenseCache d1, d2, out;
    double prob = 0.0;
    bool valid = false;
};

class SiameseNet {
public:
    // Seeded init: uniform weights scaled by 1/sqrt(fan-in), forget-gate
    // bias 1, all other biases 0.
    SiameseNet(const SiameseConfig& config, std::uint64_t seed);
    SiameseNet(const SiameseConfig& config, ParameterSet params);

    double forward(const ClipFeatureSequence& seq_p, const ClipFeatureSequence& seq_q,
                   SiameseTrace* trace = nullptr) const;

    // Encoder final hidden state; both twin slots share this weight copy.
    std::vector<double> embed(const ClipFeatureSequence& seq) const;

    // Dense stack up to Z given the two embeddings.
    std::vector<double> dense_stack_z(std::span<const double> o_p,
                                      std::span<const double> o_q) const;

    // Accumulates gradients of every block given d loss / d probability.
    void backward(const SiameseTrace& trace, double d_prob, GradientTape& tape) const;

    const SiameseConfig& config() const { return config_; }
    ParameterSet& params() { return params_; }
    const ParameterSet& params() const { return params_; }

    LstmWeights encoder_weights() const;

    static std::vector<std::string> block_names();

private:
    SiameseConfig config_;
    ParameterSet params_;
};

}  // namespace aqa
