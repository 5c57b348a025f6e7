#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace aqa {

// Ordered clip feature vectors, one per fixed-length frame window.
// Storage is row-major (clip-major), widened to float64 in memory; the
// on-disk format keeps float32.
struct ClipFeatureSequence {
    std::size_t dim = 0;
    std::vector<double> data;          // length = clip_count() * dim
    std::size_t clip_frames = 16;      // informational

    std::size_t clip_count() const { return dim == 0 ? 0 : data.size() / dim; }

    std::span<const double> clip(std::size_t index) const {
        return {data.data() + index * dim, dim};
    }
    std::span<double> clip(std::size_t index) {
        return {data.data() + index * dim, dim};
    }

    bool clip_is_zero(std::size_t index) const;
};

// Binary clip-feature file:
//   magic "AQAF" | u32 version=1 | u16 id length | id bytes (UTF-8)
//   | u32 action_type | u32 clip count n | u32 dim D
//   | n*D float32, little-endian, clip-major.
struct FeatureFile {
    std::string id;
    std::uint32_t action_type = 0;
    ClipFeatureSequence features;
};

void write_features(const std::filesystem::path& path, const FeatureFile& file);
FeatureFile load_features(const std::filesystem::path& path);

// Prepends zero clips so the sequence reaches n_target. Sequences longer
// than n_target are rejected; callers must truncate explicitly.
ClipFeatureSequence pad_to_length(const ClipFeatureSequence& seq, std::size_t n_target);

// Drops leading clips so the sequence shrinks to n_target, keeping the
// action's ending aligned.
ClipFeatureSequence truncate_front(const ClipFeatureSequence& seq, std::size_t n_target);

}  // namespace aqa
