#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <vector>

#include "aqa/dataset.hpp"

namespace aqa {

// Generator for desk-scale datasets with verifiable ground truth. Each
// action type gets a random prototype trajectory; every video is the
// prototype plus per-clip deviations of a per-video sloppiness scale,
// with optional planted fault vectors, and its score is an exact
// function of the deviation norms:
//   S = clamp(max_score - score_penalty * sum_j ||d_j||, 0, max_score)
// One zero-deviation expert per type scores exactly max_score.
struct SyntheticConfig {
    std::size_t num_types = 3;
    std::size_t videos_per_type = 200;  // excluding the expert
    std::size_t clips = 9;
    std::size_t dim = 64;
    double prototype_scale = 1.0;
    double deviation_sigma = 1.0;       // per-clip deviation norm = sloppiness * sigma
    double fault_probability = 0.08;    // per clip
    double fault_magnitude = 2.5;       // norm of each planted fault vector
    double score_penalty = 6.0;
    double max_score = 100.0;
    double train_dml_fraction = 0.6;
    double train_score_fraction = 0.25;  // remainder is the test split
    std::uint64_t seed = 7;
};

struct GeneratedVideo {
    ManifestRow row;
    ClipFeatureSequence features;
    std::vector<double> clip_deviation_norms;   // per clip, fault included
    std::vector<std::size_t> fault_clips;       // 1-based indices
    bool is_expert = false;
};

struct GeneratedDataset {
    SyntheticConfig config;
    std::vector<GeneratedVideo> videos;

    const GeneratedVideo* find(std::string_view id) const;
};

// Score from deviation norms, the same arithmetic the generator applies.
double planted_score(const SyntheticConfig& config, const std::vector<double>& clip_norms);

GeneratedDataset generate_dataset(const SyntheticConfig& config);

// Writes manifest.csv, features/*.aqaf, faults.csv (video id, 1-based
// clip index) and gen_config.json under the directory.
void write_dataset(const GeneratedDataset& dataset, const std::filesystem::path& dir);

SyntheticConfig synthetic_config_from_json_file(const std::filesystem::path& path);
std::string synthetic_config_to_json(const SyntheticConfig& config);

// Ground-truth pair label from the planted scores, bypassing the files.
int oracle_pair_label(const GeneratedVideo& a, const GeneratedVideo& b, double threshold);

// Planted faults of test-split videos as (video id -> 1-based indices).
std::map<std::string, std::set<std::size_t>> fault_index(const GeneratedDataset& dataset);

}  // namespace aqa
