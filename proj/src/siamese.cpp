#include "aqa/siamese.hpp"

#include <cmath>

#include "aqa/errors.hpp"
#include "aqa/rng.hpp"

namespace aqa {

namespace {

void init_uniform(Rng& rng, std::vector<double>& values, std::size_t fan_in) {
    double scale = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (double& v : values) v = rng.uniform(-scale, scale);
}

}  // namespace

std::vector<std::string> SiameseNet::block_names() {
    return {"encoder.W", "encoder.U", "encoder.b", "d1.W", "d1.b",
            "d2.W",      "d2.b",      "out.w",     "out.b"};
}

SiameseNet::SiameseNet(const SiameseConfig& config, std::uint64_t seed) : config_(config) {
    std::size_t D = config.feature_dim, M = config.embed_dim;
    std::size_t H1 = SiameseConfig::kHidden1, H2 = SiameseConfig::kHidden2;
    if (D == 0 || M == 0) throw ConfigError("siamese: feature and embed dims must be positive");

    params_.add("encoder.W", {4 * M, D});
    params_.add("encoder.U", {4 * M, M});
    params_.add("encoder.b", {4 * M});
    params_.add("d1.W", {H1, 2 * M});
    params_.add("d1.b", {H1});
    params_.add("d2.W", {H2, H1});
    params_.add("d2.b", {H2});
    params_.add("out.w", {1, H2});
    params_.add("out.b", {1});

    Rng rng(seed);
    init_uniform(rng, params_.at("encoder.W").values, D);
    init_uniform(rng, params_.at("encoder.U").values, M);
    // forget-gate bias 1 keeps early memory open
    auto& eb = params_.at("encoder.b").values;
    for (std::size_t k = M; k < 2 * M; ++k) eb[k] = 1.0;
    init_uniform(rng, params_.at("d1.W").values, 2 * M);
    init_uniform(rng, params_.at("d2.W").values, H1);
    init_uniform(rng, params_.at("out.w").values, H2);
}

SiameseNet::SiameseNet(const SiameseConfig& config, ParameterSet params)
    : config_(config), params_(std::move(params)) {
    std::size_t D = config.feature_dim, M = config.embed_dim;
    for (const auto& name : block_names())
        if (!params_.has(name))
            throw ConfigError("siamese: parameter set is missing block '" + name + "'");
    if (params_.at("encoder.W").values.size() != 4 * M * D)
        throw ShapeError("siamese: encoder.W does not match configured dims");
    params_.validate();
}

LstmWeights SiameseNet::encoder_weights() const {
    LstmWeights w;
    w.W = params_.at("encoder.W").values;
    w.U = params_.at("encoder.U").values;
    w.b = params_.at("encoder.b").values;
    w.input_dim = config_.feature_dim;
    w.hidden_dim = config_.embed_dim;
    return w;
}

std::vector<double> SiameseNet::embed(const ClipFeatureSequence& seq) const {
    return lstm_sequence_forward(encoder_weights(), seq);
}

std::vector<double> SiameseNet::dense_stack_z(std::span<const double> o_p,
                                              std::span<const double> o_q) const {
    std::size_t M = config_.embed_dim;
    if (o_p.size() != M || o_q.size() != M)
        throw ShapeError("dense_stack_z: embedding length != M");
    std::vector<double> x(2 * M);
    std::copy(o_p.begin(), o_p.end(), x.begin());
    std::copy(o_q.begin(), o_q.end(), x.begin() + static_cast<std::ptrdiff_t>(M));

    auto y = dense_forward(params_.at("d1.W").values, params_.at("d1.b").values, x,
                           SiameseConfig::kHidden1, 2 * M, config_.dense_activation);
    return dense_forward(params_.at("d2.W").values, params_.at("d2.b").values, y,
                         SiameseConfig::kHidden2, SiameseConfig::kHidden1,
                         config_.dense_activation);
}

double SiameseNet::forward(const ClipFeatureSequence& seq_p, const ClipFeatureSequence& seq_q,
                           SiameseTrace* trace) const {
    std::size_t M = config_.embed_dim;
    LstmWeights enc = encoder_weights();

    LstmTrace local_p, local_q;
    LstmTrace* tp = trace ? &trace->enc_p : &local_p;
    LstmTrace* tq = trace ? &trace->enc_q : &local_q;
    std::vector<double> o_p = lstm_sequence_forward(enc, seq_p, tp);
    std::vector<double> o_q = lstm_sequence_forward(enc, seq_q, tq);

    std::vector<double> x(2 * M);
    std::copy(o_p.begin(), o_p.end(), x.begin());
    std::copy(o_q.begin(), o_q.end(), x.begin() + static_cast<std::ptrdiff_t>(M));

    DenseCache local_d1, local_d2, local_out;
    auto y = dense_forward(params_.at("d1.W").values, params_.at("d1.b").values, x,
                           SiameseConfig::kHidden1, 2 * M, config_.dense_activation,
                           trace ? &trace->d1 : &local_d1);
    auto z = dense_forward(params_.at("d2.W").values, params_.at("d2.b").values, y,
                           SiameseConfig::kHidden2, SiameseConfig::kHidden1,
                           config_.dense_activation, trace ? &trace->d2 : &local_d2);
    auto p = dense_forward(params_.at("out.w").values, params_.at("out.b").values, z, 1,
                           SiameseConfig::kHidden2, Activation::Sigmoid,
                           trace ? &trace->out : &local_out);

    if (trace) {
        trace->prob = p[0];
        trace->valid = true;
    }
    return p[0];
}

void SiameseNet::backward(const SiameseTrace& trace, double d_prob, GradientTape& tape) const {
    if (!trace.valid)
        throw StateError("siamese backward called without a completed forward trace");
    std::size_t M = config_.embed_dim;

    std::vector<double> dp{d_prob};
    std::vector<double> dz;
    dense_backward(params_.at("out.w").values, trace.out, dp, 1, SiameseConfig::kHidden2,
                   Activation::Sigmoid, tape.grad("out.w"), tape.grad("out.b"), &dz);

    std::vector<double> dy;
    dense_backward(params_.at("d2.W").values, trace.d2, dz, SiameseConfig::kHidden2,
                   SiameseConfig::kHidden1, config_.dense_activation, tape.grad("d2.W"),
                   tape.grad("d2.b"), &dy);

    std::vector<double> dx;
    dense_backward(params_.at("d1.W").values, trace.d1, dy, SiameseConfig::kHidden1, 2 * M,
                   config_.dense_activation, tape.grad("d1.W"), tape.grad("d1.b"), &dx);

    LstmWeights enc = encoder_weights();
    LstmGrads enc_grads{tape.grad("encoder.W"), tape.grad("encoder.U"),
                        tape.grad("encoder.b")};
    // both twins accumulate into the single encoder copy
    lstm_backward(enc, trace.enc_p, std::span<const double>(dx).first(M), enc_grads);
    lstm_backward(enc, trace.enc_q, std::span<const double>(dx).subspan(M), enc_grads);
}

}  // namespace aqa
