#include "aqa/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "aqa/errors.hpp"
#include "aqa/feedback.hpp"
#include "aqa/pairs.hpp"
#include "json.hpp"

namespace aqa {
namespace pipeline {

namespace {

std::size_t resolve_feature_dim(const RunConfig& config,
                                const std::vector<VideoRecord>& videos) {
    if (videos.empty()) throw ConfigError("no videos in the requested split");
    std::size_t data_dim = videos.front().features.dim;
    for (const auto& v : videos)
        if (v.features.dim != data_dim)
            throw ShapeError("video '" + v.id + "' has feature dim " +
                             std::to_string(v.features.dim) + ", expected " +
                             std::to_string(data_dim));
    if (config.model.feature_dim != 0 && config.model.feature_dim != data_dim)
        throw ConfigError("configured feature_dim " +
                          std::to_string(config.model.feature_dim) +
                          " does not match the data (" + std::to_string(data_dim) + ")");
    return data_dim;
}

LoadOptions load_options(const RunConfig& config, std::optional<Split> split) {
    LoadOptions opts;
    opts.split = split;
    opts.pad_to = config.activity.n_clips;
    opts.allow_truncation = config.allow_truncation;
    opts.max_score = config.activity.score_max;
    return opts;
}

std::vector<VideoRecord> load_non_test(const DatasetManifest& manifest,
                                       const RunConfig& config) {
    auto dml = load_videos(manifest, load_options(config, Split::TrainDml));
    auto score = load_videos(manifest, load_options(config, Split::TrainScore));
    dml.insert(dml.end(), std::make_move_iterator(score.begin()),
               std::make_move_iterator(score.end()));
    return dml;
}

void verify_hash(const CheckpointMeta& meta, const RunConfig& config, std::size_t dim,
                 const std::string& what) {
    std::string expected = config_hash(config, dim);
    if (meta.config_hash != expected)
        throw ConfigError(what + ": checkpoint was trained with config hash " +
                          meta.config_hash + ", current configuration hashes to " +
                          expected + "; refusing to mix architectures");
}

nlohmann::ordered_json report_core_json(const EvalReport& report, double mse_band) {
    nlohmann::ordered_json j;
    j["n"] = report.n;
    j["rho"] = report.rho;
    j["mse"] = report.mse;
    j["mse_band"] = mse_band;
    nlohmann::ordered_json per_type = nlohmann::ordered_json::object();
    for (const auto& [type, value] : report.rho_per_type) {
        nlohmann::ordered_json entry;
        entry["rho"] = value;
        auto it = report.mse_per_type.find(type);
        if (it != report.mse_per_type.end()) entry["mse"] = it->second;
        per_type[std::to_string(type)] = entry;
    }
    j["per_type"] = per_type;
    return j;
}

double mse_acceptance_band(double score_max) {
    // 5% of (score_max^2 * 0.01); 5.0 on the 0..100 scale
    return 0.05 * score_max * score_max * 0.01;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write " + path.string());
    out << text;
}

}  // namespace

std::filesystem::path dml_checkpoint_path(const std::filesystem::path& run_dir) {
    return run_dir / "checkpoints" / "dml.aqac";
}

std::filesystem::path score_checkpoint_path(const std::filesystem::path& run_dir) {
    return run_dir / "checkpoints" / "score.aqac";
}

void echo_config(const RunConfig& config, const std::filesystem::path& run_dir) {
    std::filesystem::create_directories(run_dir);
    write_text(run_dir / "config.echo.json", run_config_to_json(config));
}

TrainDmlOutput train_dml_command(const RunConfig& config,
                                 const std::filesystem::path& manifest_path,
                                 const std::filesystem::path& run_dir) {
    echo_config(config, run_dir);
    DatasetManifest manifest = load_manifest(manifest_path);
    auto videos = load_videos(manifest, load_options(config, Split::TrainDml));
    std::size_t dim = resolve_feature_dim(config, videos);

    SiameseConfig net_config;
    net_config.feature_dim = dim;
    net_config.embed_dim = config.model.embed_dim;
    net_config.dense_activation = config.model.dense_activation;
    SiameseNet net(net_config, derive_seed(config.seed, "dml-init"));

    auto pairs = make_pairs(videos, config.activity.pair_threshold);

    DmlTrainConfig train_config = config.dml;
    train_config.seed = derive_seed(config.seed, "dml-train");
    train_config.sequence_length = config.activity.n_clips;

    TrainDmlOutput output;
    output.result = train_dml(net, pairs, videos, train_config);
    write_history_csv(run_dir / "dml_history.csv", output.result.history);

    std::filesystem::create_directories(run_dir / "checkpoints");
    Checkpoint checkpoint;
    checkpoint.meta.phase = "dml";
    checkpoint.meta.epoch = output.result.best_epoch;
    checkpoint.meta.seed = config.seed;
    checkpoint.meta.config_hash = config_hash(config, dim);
    checkpoint.params = net.params();
    output.checkpoint = dml_checkpoint_path(run_dir);
    save_checkpoint(output.checkpoint, checkpoint);
    return output;
}

SiameseNet net_from_checkpoint(const Checkpoint& checkpoint, const RunConfig& config) {
    const auto& enc = checkpoint.params.at("encoder.W");
    if (enc.shape.size() != 2 || enc.shape[0] % 4 != 0)
        throw ParseError("checkpoint: encoder.W has an unexpected shape");
    SiameseConfig net_config;
    net_config.embed_dim = enc.shape[0] / 4;
    net_config.feature_dim = enc.shape[1];
    net_config.dense_activation = config.model.dense_activation;
    if (net_config.embed_dim != config.model.embed_dim)
        throw ConfigError("checkpoint embed_dim " + std::to_string(net_config.embed_dim) +
                          " does not match configured " +
                          std::to_string(config.model.embed_dim));

    ParameterSet params;
    for (const auto& name : SiameseNet::block_names()) params.add(checkpoint.params.at(name));
    return SiameseNet(net_config, std::move(params));
}

TrainScoreOutput train_score_command(const RunConfig& config,
                                     const std::filesystem::path& manifest_path,
                                     const std::filesystem::path& run_dir,
                                     const std::filesystem::path& dml_checkpoint) {
    echo_config(config, run_dir);
    Checkpoint loaded = load_checkpoint(dml_checkpoint);
    if (loaded.meta.phase != "dml")
        throw ConfigError("train-score: expected a dml-phase checkpoint, got phase '" +
                          loaded.meta.phase + "'");

    DatasetManifest manifest = load_manifest(manifest_path);
    auto non_test = load_non_test(manifest, config);
    std::size_t dim = resolve_feature_dim(config, non_test);
    verify_hash(loaded.meta, config, dim, "train-score");

    SiameseNet net = net_from_checkpoint(loaded, config);
    ExpertRegistry registry = registry_for(config, non_test);

    // training pool: the score split plus any referenced expert videos
    std::vector<VideoRecord> pool;
    for (auto& v : non_test)
        if (v.split == Split::TrainScore) pool.push_back(v);
    {
        std::set<std::string> present;
        for (const auto& v : pool) present.insert(v.id);
        std::set<std::string> wanted;
        for (const auto& [type, ids] : registry.references)
            for (const auto& id : ids) wanted.insert(id);
        for (const auto& v : non_test)
            if (wanted.count(v.id) && !present.count(v.id)) pool.push_back(v);
    }

    ScoreHead head = ScoreHead::zeros(config.activity.score_max);
    ScoreTrainConfig train_config = config.score;
    train_config.seed = derive_seed(config.seed, "score-train");

    TrainScoreOutput output;
    output.result = train_score_head(net, head, registry, pool, train_config);

    {
        std::ofstream out(run_dir / "score_history.csv");
        if (!out) throw ParseError("cannot write score history");
        out << "epoch,loss\n";
        for (const auto& h : output.result.history)
            out << h.epoch << ',' << format_double(h.mean_loss) << "\n";
    }

    Checkpoint score_ckpt;
    score_ckpt.meta.phase = "score";
    score_ckpt.meta.epoch = config.score.epochs;
    score_ckpt.meta.seed = config.seed;
    score_ckpt.meta.config_hash = loaded.meta.config_hash;
    score_ckpt.params = net.params();  // frozen blocks, byte for byte
    ParameterBlock head_w;
    head_w.name = "head.w";
    head_w.shape = {head.w.size()};
    head_w.values = head.w;
    score_ckpt.params.add(std::move(head_w));
    ParameterBlock head_b;
    head_b.name = "head.b";
    head_b.shape = {1};
    head_b.values = {head.b};
    score_ckpt.params.add(std::move(head_b));

    std::filesystem::create_directories(run_dir / "checkpoints");
    output.checkpoint = score_checkpoint_path(run_dir);
    save_checkpoint(output.checkpoint, score_ckpt);
    return output;
}

LoadedModel model_from_score_checkpoint(const std::filesystem::path& path,
                                        const RunConfig& config) {
    Checkpoint loaded = load_checkpoint(path);
    if (loaded.meta.phase != "score")
        throw ConfigError("expected a score-phase checkpoint at " + path.string() +
                          ", got phase '" + loaded.meta.phase + "'");
    SiameseNet net = net_from_checkpoint(loaded, config);
    ScoreHead head;
    head.w = loaded.params.at("head.w").values;
    head.b = loaded.params.at("head.b").values.at(0);
    head.score_scale = config.activity.score_max;
    return LoadedModel{std::move(net), std::move(head), loaded.meta};
}

ExpertRegistry registry_for(const RunConfig& config, const std::vector<VideoRecord>& videos) {
    return select_experts(videos, config.expert_mode, config.constant_expert_type);
}

void write_predictions_csv(const std::filesystem::path& path, const Predictions& p) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write predictions: " + path.string());
    out << "id,true_score,predicted_score,expert_id\n";
    for (std::size_t k = 0; k < p.ids.size(); ++k)
        out << p.ids[k] << ',' << format_double(p.truth[k]) << ','
            << format_double(p.predicted[k]) << ',' << p.expert_ids[k] << "\n";
}

Predictions load_predictions_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw MissingDependencyError("cannot open predictions: " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != "id,true_score,predicted_score,expert_id")
        throw ParseError(path.string() + ": bad predictions header");
    Predictions p;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string id, truth, pred, expert;
        if (!std::getline(ss, id, ',') || !std::getline(ss, truth, ',') ||
            !std::getline(ss, pred, ',') || !std::getline(ss, expert))
            throw ParseError(path.string() + " row " + std::to_string(row) +
                             ": expected 4 fields");
        p.ids.push_back(id);
        p.truth.push_back(std::stod(truth));
        p.predicted.push_back(std::stod(pred));
        p.expert_ids.push_back(expert);
        p.action_types.push_back(0);  // not stored in the csv
    }
    return p;
}

PrecisionRecall feedback_precision_recall(
    const SiameseNet& net, const ExpertRegistry& registry,
    const std::map<std::string, const VideoRecord*>& by_id,
    const std::vector<const VideoRecord*>& test_videos,
    const std::map<std::string, std::set<std::size_t>>& true_faults, double threshold) {
    std::size_t hits = 0, predicted_total = 0, truth_total = 0;
    for (const VideoRecord* video : test_videos) {
        const auto& expert_ids = registry.for_type(video->action_type);
        const VideoRecord* expert = by_id.at(expert_ids.front());
        auto feedback = feedback_for_video(net, expert->features, video->features, threshold);

        std::set<std::size_t> predicted;
        for (const auto& fb : feedback)
            if (fb.faulty && !fb.padded) predicted.insert(fb.clip_index);
        std::set<std::size_t> truth;
        if (auto it = true_faults.find(video->id); it != true_faults.end()) truth = it->second;

        predicted_total += predicted.size();
        truth_total += truth.size();
        for (std::size_t idx : predicted) hits += truth.count(idx);
    }
    PrecisionRecall pr;
    pr.precision = predicted_total == 0
                       ? (truth_total == 0 ? 1.0 : 0.0)
                       : static_cast<double>(hits) / static_cast<double>(predicted_total);
    pr.recall = truth_total == 0
                    ? 1.0
                    : static_cast<double>(hits) / static_cast<double>(truth_total);
    return pr;
}

EvalReport evaluate_command(const RunConfig& config,
                            const std::filesystem::path& manifest_path,
                            const std::filesystem::path& run_dir) {
    echo_config(config, run_dir);
    DatasetManifest manifest = load_manifest(manifest_path);
    auto non_test = load_non_test(manifest, config);
    auto test_videos = load_videos(manifest, load_options(config, Split::Test));
    if (test_videos.empty()) throw ConfigError("evaluate: the test split is empty");
    std::size_t dim = resolve_feature_dim(config, test_videos);

    LoadedModel model = model_from_score_checkpoint(score_checkpoint_path(run_dir), config);
    verify_hash(model.meta, config, dim, "evaluate");
    ExpertRegistry registry = registry_for(config, non_test);

    std::map<std::string, const VideoRecord*> by_id;
    for (const auto& v : non_test) by_id[v.id] = &v;

    Predictions predictions;
    for (const auto& video : test_videos) {
        predictions.ids.push_back(video.id);
        predictions.truth.push_back(video.overall_score);
        predictions.predicted.push_back(
            predict_score(model.net, model.head, registry, by_id, video));
        predictions.action_types.push_back(video.action_type);
        const auto& expert_ids = registry.for_type(video.action_type);
        std::string joined;
        for (std::size_t k = 0; k < expert_ids.size(); ++k) {
            if (k) joined += ';';
            joined += expert_ids[k];
        }
        predictions.expert_ids.push_back(joined);
    }
    write_predictions_csv(run_dir / "predictions.csv", predictions);

    EvalReport report =
        evaluate_scores(predictions.predicted, predictions.truth, predictions.action_types);

    nlohmann::ordered_json j =
        report_core_json(report, mse_acceptance_band(config.activity.score_max));
    j["expert_mode"] = std::string(expert_mode_name(config.expert_mode));

    // faulty-clip metrics when the dataset ships planted fault labels
    std::filesystem::path faults_path = manifest_path.parent_path() / "faults.csv";
    if (std::filesystem::exists(faults_path)) {
        std::map<std::string, std::set<std::size_t>> true_faults;
        std::ifstream in(faults_path);
        std::string line;
        std::getline(in, line);  // header
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            auto comma = line.find(',');
            if (comma == std::string::npos)
                throw ParseError(faults_path.string() + ": bad row '" + line + "'");
            true_faults[line.substr(0, comma)].insert(std::stoul(line.substr(comma + 1)));
        }
        std::vector<const VideoRecord*> ptrs;
        for (const auto& v : test_videos) ptrs.push_back(&v);
        auto test_by_id = by_id;
        for (const auto& v : test_videos) test_by_id[v.id] = &v;
        PrecisionRecall pr =
            feedback_precision_recall(model.net, registry, test_by_id, ptrs, true_faults);
        j["feedback"] = {{"precision", pr.precision}, {"recall", pr.recall}};
    }

    write_text(run_dir / "report.json", j.dump(2) + "\n");

    // report.csv keeps to fields reproducible from predictions.csv alone,
    // so the report subcommand can regenerate it byte for byte
    std::ostringstream csv;
    csv << "metric,action_type,value\n";
    csv << "rho,all," << format_double(report.rho) << "\n";
    csv << "mse,all," << format_double(report.mse) << "\n";
    csv << "n,all," << report.n << "\n";
    write_text(run_dir / "report.csv", csv.str());
    return report;
}

void feedback_command(const RunConfig& config, const std::filesystem::path& manifest_path,
                      const std::filesystem::path& run_dir,
                      const std::vector<std::string>& video_ids) {
    DatasetManifest manifest = load_manifest(manifest_path);
    auto non_test = load_non_test(manifest, config);
    auto test_videos = load_videos(manifest, load_options(config, Split::Test));
    std::size_t dim = resolve_feature_dim(config, non_test);

    LoadedModel model = model_from_score_checkpoint(score_checkpoint_path(run_dir), config);
    verify_hash(model.meta, config, dim, "feedback");
    ExpertRegistry registry = registry_for(config, non_test);

    std::map<std::string, const VideoRecord*> by_id;
    for (const auto& v : non_test) by_id[v.id] = &v;
    for (const auto& v : test_videos) by_id[v.id] = &v;

    std::vector<const VideoRecord*> targets;
    if (video_ids.empty()) {
        for (const auto& v : test_videos) targets.push_back(&v);
    } else {
        for (const auto& id : video_ids) {
            auto it = by_id.find(id);
            if (it == by_id.end())
                throw MissingDependencyError("feedback: unknown video id '" + id + "'");
            targets.push_back(it->second);
        }
    }

    std::filesystem::create_directories(run_dir / "feedback");
    for (const VideoRecord* video : targets) {
        const auto& expert_ids = registry.for_type(video->action_type);
        const VideoRecord* expert = by_id.at(expert_ids.front());
        auto feedback = feedback_for_video(model.net, expert->features, video->features);
        write_feedback_csv(run_dir / "feedback" / (video->id + ".csv"), feedback);
        write_feedback_svg(run_dir / "feedback" / (video->id + ".svg"), feedback);
    }
}

void report_command(const std::filesystem::path& run_dir) {
    Predictions p = load_predictions_csv(run_dir / "predictions.csv");

    // overall metrics come from the stored predictions; sections that need
    // model or dataset state are carried over from the previous report
    EvalReport fresh;
    fresh.n = p.ids.size();
    fresh.rho = spearman_rho(p.predicted, p.truth);
    fresh.mse = mean_squared_error(p.predicted, p.truth);

    nlohmann::ordered_json j;
    std::filesystem::path report_path = run_dir / "report.json";
    double band = 0.0;
    {
        std::ifstream echo(run_dir / "config.echo.json");
        if (echo) {
            nlohmann::json cfg = nlohmann::json::parse(echo, nullptr, false);
            if (!cfg.is_discarded() && cfg.contains("activity"))
                band = mse_acceptance_band(cfg["activity"].value("score_max", 100.0));
        }
    }
    if (std::filesystem::exists(report_path)) {
        std::ifstream in(report_path);
        j = nlohmann::ordered_json::parse(in);
        j["n"] = fresh.n;
        j["rho"] = fresh.rho;
        j["mse"] = fresh.mse;
        if (band > 0) j["mse_band"] = band;
    } else {
        j = report_core_json(fresh, band);
    }
    write_text(report_path, j.dump(2) + "\n");

    std::ostringstream csv;
    csv << "metric,action_type,value\n";
    csv << "rho,all," << format_double(fresh.rho) << "\n";
    csv << "mse,all," << format_double(fresh.mse) << "\n";
    csv << "n,all," << fresh.n << "\n";
    write_text(run_dir / "report.csv", csv.str());

    // redraw similarity curves from their stored csv form
    std::filesystem::path fb_dir = run_dir / "feedback";
    if (std::filesystem::exists(fb_dir)) {
        std::vector<std::filesystem::path> csvs;
        for (const auto& entry : std::filesystem::directory_iterator(fb_dir))
            if (entry.path().extension() == ".csv") csvs.push_back(entry.path());
        std::sort(csvs.begin(), csvs.end());
        for (const auto& path : csvs) {
            auto feedback = load_feedback_csv(path);
            auto svg = path;
            svg.replace_extension(".svg");
            write_feedback_svg(svg, feedback);
        }
    }
}

}  // namespace pipeline
}  // namespace aqa
