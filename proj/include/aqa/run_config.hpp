#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "aqa/dml_trainer.hpp"
#include "aqa/experts.hpp"
#include "aqa/score_head.hpp"

namespace aqa {

// Scoring regime of one activity: score range, sequence length, pair
// threshold. The vault threshold scales the diving one by the score
// range ratio (5 * 20/100 = 1).
struct ActivityProfile {
    std::string name = "diving";
    double score_max = 100.0;
    std::size_t n_clips = 9;
    double pair_threshold = 5.0;
};

ActivityProfile activity_profile(std::string_view name);

struct ModelConfig {
    std::size_t embed_dim = 256;
    // 0 adopts the dimension of the loaded feature files (C3D FC-6 data
    // is 4096-wide; the synthetic oracle is narrower).
    std::size_t feature_dim = 0;
    Activation dense_activation = Activation::Relu;
};

struct RunConfig {
    ActivityProfile activity;
    ModelConfig model;
    DmlTrainConfig dml;
    ScoreTrainConfig score;
    ExpertMode expert_mode = ExpertMode::BestPerType;
    std::optional<int> constant_expert_type;
    std::uint64_t seed = 42;
    bool allow_truncation = false;
};

// JSON file -> config; absent keys keep their defaults.
RunConfig load_run_config(const std::filesystem::path& path);
RunConfig run_config_from_json(const std::string& text, const std::string& origin);
std::string run_config_to_json(const RunConfig& config);

// Architecture identity for resume checks: hex CRC32 over the activity
// and model sections with the feature dimension resolved.
std::string config_hash(const RunConfig& config, std::size_t resolved_feature_dim);

}  // namespace aqa
