#include "aqa/run_config.hpp"

#include <zlib.h>

#include <fstream>
#include <sstream>

#include "aqa/errors.hpp"
#include "json.hpp"

namespace aqa {

ActivityProfile activity_profile(std::string_view name) {
    if (name == "diving") return {"diving", 100.0, 9, 5.0};
    if (name == "vault") return {"vault", 20.0, 5, 1.0};
    if (name == "custom") return {"custom", 100.0, 9, 5.0};
    throw ConfigError("unknown activity: '" + std::string(name) +
                      "' (expected diving|vault|custom)");
}

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

void parse_activity(const json& j, ActivityProfile& a) {
    if (j.is_string()) {
        a = activity_profile(j.get<std::string>());
        return;
    }
    if (!j.is_object()) throw ConfigError("config: activity must be a name or an object");
    if (j.contains("name")) a = activity_profile(j["name"].get<std::string>());
    a.score_max = j.value("score_max", a.score_max);
    a.n_clips = j.value("n_clips", a.n_clips);
    a.pair_threshold = j.value("pair_threshold", a.pair_threshold);
    if (a.pair_threshold <= 0) throw ConfigError("config: pair_threshold must be positive");
    if (a.score_max <= 0) throw ConfigError("config: score_max must be positive");
    if (a.n_clips == 0) throw ConfigError("config: n_clips must be positive");
}

void parse_dml(const json& j, DmlTrainConfig& d) {
    d.epochs = j.value("epochs", d.epochs);
    d.batch_size = j.value("batch_size", d.batch_size);
    d.learning_rate = j.value("learning_rate", d.learning_rate);
    if (j.contains("optimizer"))
        d.optimizer = optimizer_from_string(j["optimizer"].get<std::string>());
    d.symmetrize = j.value("symmetrize", d.symmetrize);
    d.patience = j.value("patience", d.patience);
    d.holdout_pair_fraction = j.value("holdout_pair_fraction", d.holdout_pair_fraction);
    d.max_train_pairs = j.value("max_train_pairs", d.max_train_pairs);
    d.max_holdout_pairs = j.value("max_holdout_pairs", d.max_holdout_pairs);
    d.balance = j.value("balance", d.balance);
    d.balance_target = j.value("balance_target", d.balance_target);
    d.jitter_sigma = j.value("jitter_sigma", d.jitter_sigma);
    if (d.epochs == 0 || d.batch_size == 0)
        throw ConfigError("config: dml epochs and batch_size must be positive");
}

void parse_score(const json& j, ScoreTrainConfig& s) {
    s.epochs = j.value("epochs", s.epochs);
    s.learning_rate = j.value("learning_rate", s.learning_rate);
    if (j.contains("optimizer"))
        s.optimizer = optimizer_from_string(j["optimizer"].get<std::string>());
    if (s.epochs == 0) throw ConfigError("config: score epochs must be positive");
}

}  // namespace

RunConfig run_config_from_json(const std::string& text, const std::string& origin) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(origin + ": " + e.what());
    }
    RunConfig cfg;
    try {
        if (j.contains("activity")) parse_activity(j["activity"], cfg.activity);
        if (j.contains("model")) {
            const auto& m = j["model"];
            cfg.model.embed_dim = m.value("embed_dim", cfg.model.embed_dim);
            cfg.model.feature_dim = m.value("feature_dim", cfg.model.feature_dim);
            if (m.contains("activation"))
                cfg.model.dense_activation =
                    activation_from_string(m["activation"].get<std::string>());
            if (cfg.model.embed_dim == 0)
                throw ConfigError("config: embed_dim must be positive");
        }
        if (j.contains("dml")) parse_dml(j["dml"], cfg.dml);
        if (j.contains("score")) parse_score(j["score"], cfg.score);
        if (j.contains("expert_mode"))
            cfg.expert_mode = expert_mode_from_string(j["expert_mode"].get<std::string>());
        if (j.contains("constant_expert_type") && !j["constant_expert_type"].is_null())
            cfg.constant_expert_type = j["constant_expert_type"].get<int>();
        cfg.seed = j.value("seed", cfg.seed);
        cfg.allow_truncation = j.value("allow_truncation", cfg.allow_truncation);
    } catch (const json::exception& e) {
        throw ConfigError(origin + ": " + e.what());
    }
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw MissingDependencyError("cannot open config: " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return run_config_from_json(ss.str(), path.string());
}

std::string run_config_to_json(const RunConfig& cfg) {
    ordered_json j;
    j["activity"] = {{"name", cfg.activity.name},
                     {"score_max", cfg.activity.score_max},
                     {"n_clips", cfg.activity.n_clips},
                     {"pair_threshold", cfg.activity.pair_threshold}};
    j["model"] = {{"embed_dim", cfg.model.embed_dim},
                  {"feature_dim", cfg.model.feature_dim},
                  {"activation", std::string(activation_name(cfg.model.dense_activation))}};
    j["dml"] = {{"epochs", cfg.dml.epochs},
                {"batch_size", cfg.dml.batch_size},
                {"learning_rate", cfg.dml.learning_rate},
                {"optimizer", cfg.dml.optimizer == OptimizerKind::Adam ? "adam" : "sgd"},
                {"symmetrize", cfg.dml.symmetrize},
                {"patience", cfg.dml.patience},
                {"holdout_pair_fraction", cfg.dml.holdout_pair_fraction},
                {"max_train_pairs", cfg.dml.max_train_pairs},
                {"max_holdout_pairs", cfg.dml.max_holdout_pairs},
                {"balance", cfg.dml.balance},
                {"balance_target", cfg.dml.balance_target},
                {"jitter_sigma", cfg.dml.jitter_sigma}};
    j["score"] = {{"epochs", cfg.score.epochs},
                  {"learning_rate", cfg.score.learning_rate},
                  {"optimizer", cfg.score.optimizer == OptimizerKind::Adam ? "adam" : "sgd"}};
    j["expert_mode"] = std::string(expert_mode_name(cfg.expert_mode));
    if (cfg.constant_expert_type)
        j["constant_expert_type"] = *cfg.constant_expert_type;
    else
        j["constant_expert_type"] = nullptr;
    j["seed"] = cfg.seed;
    j["allow_truncation"] = cfg.allow_truncation;
    return j.dump(2) + "\n";
}

std::string config_hash(const RunConfig& cfg, std::size_t resolved_feature_dim) {
    ordered_json j;
    j["activity"] = {{"score_max", cfg.activity.score_max},
                     {"n_clips", cfg.activity.n_clips},
                     {"pair_threshold", cfg.activity.pair_threshold}};
    j["model"] = {{"embed_dim", cfg.model.embed_dim},
                  {"feature_dim", resolved_feature_dim},
                  {"activation", std::string(activation_name(cfg.model.dense_activation))}};
    std::string text = j.dump();
    std::uint32_t crc = static_cast<std::uint32_t>(
        ::crc32(0L, reinterpret_cast<const Bytef*>(text.data()),
                static_cast<uInt>(text.size())));
    char buf[9];
    std::snprintf(buf, sizeof(buf), "%08x", crc);
    return buf;
}

}  // namespace aqa
