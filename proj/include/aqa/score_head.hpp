#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "aqa/experts.hpp"
#include "aqa/optimizer.hpp"
#include "aqa/siamese.hpp"

namespace aqa {

// Regression head on top of a frozen Siamese: the sigmoid output layer is
// replaced by a linear layer reading Z. The pairing contract is ordered,
// expert in the first twin slot, test video in the second.
struct ScoreHead {
    std::vector<double> w;        // length kHidden2
    double b = 0.0;
    double score_scale = 100.0;   // denormalization factor (activity max score)

    static ScoreHead zeros(double score_scale);
};

// Normalized regression output w . Z + b, before denormalization.
double score_forward_normalized(const SiameseNet& frozen, const ScoreHead& head,
                                const ClipFeatureSequence& expert_seq,
                                const ClipFeatureSequence& test_seq);

// Predicted score in judge units.
double score_forward(const SiameseNet& frozen, const ScoreHead& head,
                     const ClipFeatureSequence& expert_seq,
                     const ClipFeatureSequence& test_seq);

struct ScoreTrainConfig {
    std::size_t epochs = 600;
    double learning_rate = 0.02;
    OptimizerKind optimizer = OptimizerKind::Adam;
    std::uint64_t seed = 3;
};

struct ScoreEpochStats {
    std::size_t epoch = 0;
    double mean_loss = 0.0;  // normalized squared error
};

struct ScoreTrainResult {
    std::vector<ScoreEpochStats> history;
    std::size_t examples = 0;
};

// Trains w and b on (expert, video) pairs, one per combination of a
// training video with each expert of its type. Targets are normalized by
// score_scale. The Siamese is read-only throughout; embeddings and Z are
// computed once per pair since the frozen stack cannot change.
ScoreTrainResult train_score_head(const SiameseNet& frozen, ScoreHead& head,
                                  const ExpertRegistry& registry,
                                  const std::vector<VideoRecord>& train_videos,
                                  const ScoreTrainConfig& cfg);

// Mean prediction over the experts registered for the video's type.
// expert_lookup must resolve every registered expert id.
double predict_score(const SiameseNet& frozen, const ScoreHead& head,
                     const ExpertRegistry& registry,
                     const std::map<std::string, const VideoRecord*>& expert_lookup,
                     const VideoRecord& video);

// Z split into the expert-only and test-only contributions. Exact only
// for identity activations, so any other mode is rejected; dense-layer
// bias contributions are constant per expert and fold into a_e.
struct ExpertBiasTerms {
    std::vector<double> a_e;   // expert contribution, fixed per (weights, expert)
    std::vector<double> zx_q;  // test-video contribution
};

ExpertBiasTerms expert_bias_decompose(const SiameseNet& net,
                                      const ClipFeatureSequence& expert_seq,
                                      const ClipFeatureSequence& test_seq);

}  // namespace aqa
