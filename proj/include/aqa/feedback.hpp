#pragma once

#include <filesystem>
#include <vector>

#include "aqa/siamese.hpp"

namespace aqa {

// Per-clip similarity to the aligned expert clip. A clip is faulty when
// the match probability falls below the threshold; padding clips are
// flagged so consumers can ignore them.
struct ClipFeedback {
    std::size_t clip_index = 0;  // 1-based
    double similarity = 0.0;
    bool faulty = false;
    bool padded = false;
};

// Keeps clip j, zeroes clips 1..j-1, removes clips after j. Output length
// is exactly j. j is 1-based.
ClipFeatureSequence trim_for_clip(const ClipFeatureSequence& seq, std::size_t j);

// Match probability of the j-th clips: both sequences trimmed, encoded,
// and passed through the dense stack in training order (expert first).
double clip_similarity(const SiameseNet& net, const ClipFeatureSequence& expert_seq,
                       const ClipFeatureSequence& test_seq, std::size_t j);

// Indices (1-based) whose similarity falls below the threshold.
std::vector<std::size_t> faulty_clips(const std::vector<double>& similarities,
                                      double threshold = 0.5);

std::vector<ClipFeedback> feedback_for_video(const SiameseNet& net,
                                             const ClipFeatureSequence& expert_seq,
                                             const ClipFeatureSequence& test_seq,
                                             double threshold = 0.5);

// clip_index,similarity,faulty,padded
void write_feedback_csv(const std::filesystem::path& path,
                        const std::vector<ClipFeedback>& feedback);
std::vector<ClipFeedback> load_feedback_csv(const std::filesystem::path& path);

// Line chart of the similarity curve with a horizontal rule at 0.5.
void write_feedback_svg(const std::filesystem::path& path,
                        const std::vector<ClipFeedback>& feedback);

}  // namespace aqa
