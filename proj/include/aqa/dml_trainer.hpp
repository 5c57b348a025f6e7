#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "aqa/optimizer.hpp"
#include "aqa/pairs.hpp"
#include "aqa/rng.hpp"
#include "aqa/siamese.hpp"

namespace aqa {

struct DmlTrainConfig {
    std::size_t epochs = 30;
    std::size_t batch_size = 32;
    double learning_rate = 1e-4;
    OptimizerKind optimizer = OptimizerKind::Adam;
    std::uint64_t seed = 1;

    // Present every pair in both orders; the similarity relation is
    // symmetric but the concatenation is not.
    bool symmetrize = true;

    // Early stop when held-out accuracy has not improved for this many
    // epochs. 0 disables.
    std::size_t patience = 5;

    // Fraction of pairs held out for early stopping. The split is by
    // video id: a holdout partition of ids is chosen (sized so that pure
    // holdout pairs make up roughly this fraction) and only pairs fully
    // inside one partition are used on its side; mixed pairs are dropped.
    double holdout_pair_fraction = 0.10;

    // Cap on training pairs after the split, stratified by label. 0 = all.
    std::size_t max_train_pairs = 0;
    // Cap on the balanced held-out evaluation subsample.
    std::size_t max_holdout_pairs = 4000;

    // Replicate positives with augmented variants up to the negative
    // count (or balance_target when nonzero).
    bool balance = true;
    std::size_t balance_target = 0;
    double jitter_sigma = 0.05;
    // Augmented variants are realigned to this clip count. 0 = keep.
    std::size_t sequence_length = 0;
};

struct DmlEpochStats {
    std::size_t epoch = 0;
    double mean_loss = 0.0;
    double holdout_accuracy = 0.0;
};

struct DmlTrainResult {
    std::vector<DmlEpochStats> history;
    std::size_t best_epoch = 0;
    double best_accuracy = 0.0;
    std::size_t train_pairs = 0;
    std::size_t holdout_pairs = 0;
    bool diverged = false;
};

// Deterministic epoch presentation order: every pair index once (or once
// per order when symmetrized, second element 1 meaning swapped), shuffled.
std::vector<std::pair<std::size_t, int>> epoch_schedule(std::size_t pair_count,
                                                        bool symmetrize, Rng& rng);

// Fraction of pairs classified correctly at the 0.5 threshold.
double pair_accuracy(const SiameseNet& net, const std::vector<LabeledPair>& pairs,
                     const std::map<std::string, const VideoRecord*>& by_id);

// Trains the Siamese match objective on raw labeled pairs. Balancing and
// the id-level holdout split happen inside, controlled by the config; on
// divergence the last best parameters are restored.
DmlTrainResult train_dml(SiameseNet& net, const std::vector<LabeledPair>& pairs,
                         const std::vector<VideoRecord>& videos, const DmlTrainConfig& cfg);

void write_history_csv(const std::filesystem::path& path,
                       const std::vector<DmlEpochStats>& history);

}  // namespace aqa
