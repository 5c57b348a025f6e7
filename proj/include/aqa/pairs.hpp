#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "aqa/dataset.hpp"

namespace aqa {

// Binary similarity target for a pair of videos. label = 1 iff the score
// difference was below the threshold when the pair was built.
struct LabeledPair {
    std::string id_p;
    std::string id_q;
    int label = 0;
};

// All unordered pairs in canonical (sorted id) order. Empty when fewer
// than two videos are given.
std::vector<LabeledPair> make_pairs(const std::vector<VideoRecord>& videos, double threshold);

enum class AugmentKind { ClipDrop, ClipDuplicate, FeatureJitter };

AugmentKind augment_kind_from_string(std::string_view s);

// Feature-space surrogate augmentations. clip_drop removes one random
// clip, clip_duplicate repeats one, feature_jitter adds zero-mean noise
// of scale sigma to every entry.
ClipFeatureSequence augment_sequence(const ClipFeatureSequence& seq, AugmentKind kind,
                                     std::uint64_t seed, double jitter_sigma = 0.05);

struct BalanceOptions {
    std::size_t target_positive_count = 0;  // 0 = match the negative count
    double jitter_sigma = 0.05;
    std::uint64_t seed = 0;
    // Augmented variants are realigned to this length (pad or front-trim)
    // so every training sequence stays the configured size. 0 keeps the
    // source length of each variant.
    std::size_t align_to = 0;
};

struct BalanceResult {
    std::vector<LabeledPair> pairs;            // originals plus synthetic positives
    std::vector<VideoRecord> synthetic_videos; // augmented variants referenced above
    std::size_t positives = 0;
    std::size_t negatives = 0;
};

// Replicates positive pairs through augmented member videos until the
// positive count reaches min(target, negative count). Negative pairs are
// never touched; every synthetic pair keeps label 1.
BalanceResult balance_pairs(const std::vector<LabeledPair>& pairs,
                            const std::vector<VideoRecord>& videos,
                            const BalanceOptions& opts);

}  // namespace aqa
