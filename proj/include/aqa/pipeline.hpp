#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "aqa/checkpoint.hpp"
#include "aqa/metrics.hpp"
#include "aqa/run_config.hpp"

namespace aqa {
namespace pipeline {

// Run directory layout:
//   config.echo.json
//   checkpoints/dml.aqac, checkpoints/score.aqac
//   dml_history.csv, score_history.csv
//   predictions.csv, report.json, report.csv
//   feedback/<video-id>.csv|.svg

std::filesystem::path dml_checkpoint_path(const std::filesystem::path& run_dir);
std::filesystem::path score_checkpoint_path(const std::filesystem::path& run_dir);

void echo_config(const RunConfig& config, const std::filesystem::path& run_dir);

struct TrainDmlOutput {
    DmlTrainResult result;
    std::filesystem::path checkpoint;
};

TrainDmlOutput train_dml_command(const RunConfig& config,
                                 const std::filesystem::path& manifest_path,
                                 const std::filesystem::path& run_dir);

struct TrainScoreOutput {
    ScoreTrainResult result;
    std::filesystem::path checkpoint;
};

// Requires the DML checkpoint; refuses to run when its config hash does
// not match the current configuration.
TrainScoreOutput train_score_command(const RunConfig& config,
                                     const std::filesystem::path& manifest_path,
                                     const std::filesystem::path& run_dir,
                                     const std::filesystem::path& dml_checkpoint);

// Scores the test split against the configured experts; writes
// predictions.csv, report.json and report.csv. When a faults.csv sits
// next to the manifest, feedback precision/recall is included.
EvalReport evaluate_command(const RunConfig& config,
                            const std::filesystem::path& manifest_path,
                            const std::filesystem::path& run_dir);

// Per-clip similarity reports for the given ids (empty = whole test split).
void feedback_command(const RunConfig& config, const std::filesystem::path& manifest_path,
                      const std::filesystem::path& run_dir,
                      const std::vector<std::string>& video_ids);

// Regenerates report.json/report.csv and feedback SVGs from the stored
// predictions and feedback CSVs, touching no model state.
void report_command(const std::filesystem::path& run_dir);

// Shared helpers, also used by the acceptance suite.

struct LoadedModel {
    SiameseNet net;
    ScoreHead head;
    CheckpointMeta meta;
};

SiameseNet net_from_checkpoint(const Checkpoint& checkpoint, const RunConfig& config);
LoadedModel model_from_score_checkpoint(const std::filesystem::path& path,
                                        const RunConfig& config);

// Registry over the non-test rows of the manifest.
ExpertRegistry registry_for(const RunConfig& config, const std::vector<VideoRecord>& videos);

struct Predictions {
    std::vector<std::string> ids;
    std::vector<double> truth;
    std::vector<double> predicted;
    std::vector<int> action_types;
    std::vector<std::string> expert_ids;  // ';'-joined per row
};

void write_predictions_csv(const std::filesystem::path& path, const Predictions& p);
Predictions load_predictions_csv(const std::filesystem::path& path);

// Micro-averaged faulty-clip detection over the given videos, each
// compared with the first registered expert of its type.
PrecisionRecall feedback_precision_recall(
    const SiameseNet& net, const ExpertRegistry& registry,
    const std::map<std::string, const VideoRecord*>& by_id,
    const std::vector<const VideoRecord*>& test_videos,
    const std::map<std::string, std::set<std::size_t>>& true_faults, double threshold = 0.5);

}  // namespace pipeline
}  // namespace aqa
