#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "aqa/features.hpp"

namespace aqa {

enum class Split { TrainDml, TrainScore, Test };

Split split_from_string(std::string_view s);
std::string_view split_name(Split s);

// One performance: identity, action type, judged score, clip features.
struct VideoRecord {
    std::string id;
    int action_type = 0;
    double overall_score = 0.0;
    std::vector<double> judge_scores;      // optional
    std::optional<double> difficulty;      // optional
    Split split = Split::TrainDml;
    ClipFeatureSequence features;
};

struct ManifestRow {
    std::string id;
    std::string path;  // feature file, relative to the manifest
    int action_type = 0;
    double overall_score = 0.0;
    Split split = Split::TrainDml;
    std::vector<double> judge_scores;
    std::optional<double> difficulty;
};

// CSV with header id,path,action_type,overall_score,split,judge_scores,difficulty.
struct DatasetManifest {
    std::filesystem::path source_path;
    std::vector<ManifestRow> rows;

    const ManifestRow* find(std::string_view id) const;
};

DatasetManifest load_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, const DatasetManifest& manifest);

struct LoadOptions {
    std::optional<Split> split;               // only rows with this tag
    std::size_t pad_to = 0;                   // front-pad to this many clips (0 = leave)
    bool allow_truncation = false;            // front-truncate sequences longer than pad_to
    double max_score = 0.0;                   // reject scores outside [0, max_score] (0 = skip check)
};

// Loads feature files for manifest rows and assembles validated records.
// Feature paths resolve relative to the manifest location.
std::vector<VideoRecord> load_videos(const DatasetManifest& manifest, const LoadOptions& opts);

// Serializes a double exactly (shortest round-trip form).
std::string format_double(double v);

}  // namespace aqa
