#include "aqa/score_head.hpp"

#include <cmath>

#include "aqa/errors.hpp"
#include "aqa/rng.hpp"

namespace aqa {

ScoreHead ScoreHead::zeros(double score_scale) {
    ScoreHead head;
    head.w.assign(SiameseConfig::kHidden2, 0.0);
    head.b = 0.0;
    head.score_scale = score_scale;
    return head;
}

namespace {

double head_output(const ScoreHead& head, std::span<const double> z) {
    if (head.w.size() != z.size())
        throw ShapeError("score head width does not match Z");
    double acc = head.b;
    for (std::size_t k = 0; k < z.size(); ++k) acc += head.w[k] * z[k];
    return acc;
}

}  // namespace

double score_forward_normalized(const SiameseNet& frozen, const ScoreHead& head,
                                const ClipFeatureSequence& expert_seq,
                                const ClipFeatureSequence& test_seq) {
    auto o_e = frozen.embed(expert_seq);
    auto o_q = frozen.embed(test_seq);
    auto z = frozen.dense_stack_z(o_e, o_q);
    return head_output(head, z);
}

double score_forward(const SiameseNet& frozen, const ScoreHead& head,
                     const ClipFeatureSequence& expert_seq,
                     const ClipFeatureSequence& test_seq) {
    return head.score_scale * score_forward_normalized(frozen, head, expert_seq, test_seq);
}

ScoreTrainResult train_score_head(const SiameseNet& frozen, ScoreHead& head,
                                  const ExpertRegistry& registry,
                                  const std::vector<VideoRecord>& train_videos,
                                  const ScoreTrainConfig& cfg) {
    if (head.score_scale <= 0) throw ConfigError("score head: score_scale must be positive");

    std::map<std::string, const VideoRecord*> by_id;
    for (const auto& v : train_videos) by_id[v.id] = &v;

    // embeddings of a frozen encoder never change; compute each video once
    std::map<std::string, std::vector<double>> embeddings;
    auto embed_of = [&](const std::string& id) -> const std::vector<double>& {
        auto it = embeddings.find(id);
        if (it == embeddings.end())
            it = embeddings.emplace(id, frozen.embed(by_id.at(id)->features)).first;
        return it->second;
    };

    struct Example {
        std::vector<double> z;
        double target = 0.0;
    };
    std::vector<Example> examples;
    for (const auto& video : train_videos) {
        const auto& expert_ids = registry.for_type(video.action_type);
        for (const auto& expert_id : expert_ids) {
            auto expert_it = by_id.find(expert_id);
            if (expert_it == by_id.end())
                throw MissingDependencyError("expert video '" + expert_id +
                                             "' not present in the training pool");
            Example ex;
            ex.z = frozen.dense_stack_z(embed_of(expert_id), embed_of(video.id));
            ex.target = video.overall_score / head.score_scale;
            examples.push_back(std::move(ex));
        }
    }
    if (examples.empty()) throw ConfigError("train_score_head: no training examples");

    ParameterSet head_params;
    head_params.add("head.w", {head.w.size()}).values = head.w;
    head_params.add("head.b", {1}).values = {head.b};

    OptimizerState opt;
    opt.kind = cfg.optimizer;
    opt.learning_rate = cfg.learning_rate;
    GradientTape tape(head_params);

    ScoreTrainResult result;
    result.examples = examples.size();
    double inv = 1.0 / static_cast<double>(examples.size());

    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        tape.zero();
        double loss_sum = 0.0;
        auto& w = head_params.at("head.w").values;
        double b = head_params.at("head.b").values[0];
        auto& gw = tape.grad("head.w");
        auto& gb = tape.grad("head.b");
        for (const auto& ex : examples) {
            double pred = b;
            for (std::size_t k = 0; k < w.size(); ++k) pred += w[k] * ex.z[k];
            LossValue lv = mse_loss(pred, ex.target);
            loss_sum += lv.loss;
            double g = lv.grad * inv;
            for (std::size_t k = 0; k < w.size(); ++k) gw[k] += g * ex.z[k];
            gb[0] += g;
        }
        optimizer_step(opt, head_params, tape);
        result.history.push_back({epoch, loss_sum * inv});
    }

    head.w = head_params.at("head.w").values;
    head.b = head_params.at("head.b").values[0];
    return result;
}

double predict_score(const SiameseNet& frozen, const ScoreHead& head,
                     const ExpertRegistry& registry,
                     const std::map<std::string, const VideoRecord*>& expert_lookup,
                     const VideoRecord& video) {
    const auto& expert_ids = registry.for_type(video.action_type);
    double sum = 0.0;
    for (const auto& expert_id : expert_ids) {
        auto it = expert_lookup.find(expert_id);
        if (it == expert_lookup.end())
            throw MissingDependencyError("expert video '" + expert_id + "' unavailable");
        sum += score_forward(frozen, head, it->second->features, video.features);
    }
    return sum / static_cast<double>(expert_ids.size());
}

ExpertBiasTerms expert_bias_decompose(const SiameseNet& net,
                                      const ClipFeatureSequence& expert_seq,
                                      const ClipFeatureSequence& test_seq) {
    if (net.config().dense_activation != Activation::Identity)
        throw ConfigError("expert_bias_decompose requires identity dense activations; "
                          "the split is not exact under a nonlinearity");

    std::size_t M = net.config().embed_dim;
    std::size_t H1 = SiameseConfig::kHidden1, H2 = SiameseConfig::kHidden2;
    const auto& W1 = net.params().at("d1.W").values;
    const auto& b1 = net.params().at("d1.b").values;
    const auto& W2 = net.params().at("d2.W").values;
    const auto& b2 = net.params().at("d2.b").values;

    auto o_e = net.embed(expert_seq);
    auto o_q = net.embed(test_seq);

    // column split of D1: left half reads the expert embedding, right
    // half the test embedding; b1/b2 ride with the expert term
    std::vector<double> y_left(H1), y_right(H1);
    for (std::size_t r = 0; r < H1; ++r) {
        const double* row = W1.data() + r * 2 * M;
        double left = b1[r], right = 0.0;
        for (std::size_t k = 0; k < M; ++k) {
            left += row[k] * o_e[k];
            right += row[M + k] * o_q[k];
        }
        y_left[r] = left;
        y_right[r] = right;
    }

    ExpertBiasTerms terms;
    terms.a_e.resize(H2);
    terms.zx_q.resize(H2);
    matvec(W2, y_left, terms.a_e, H2, H1);
    matvec(W2, y_right, terms.zx_q, H2, H1);
    for (std::size_t k = 0; k < H2; ++k) terms.a_e[k] += b2[k];
    return terms;
}

}  // namespace aqa
