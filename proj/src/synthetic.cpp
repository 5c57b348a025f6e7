#include "aqa/synthetic.hpp"

#include <cmath>
#include <fstream>

#include "aqa/errors.hpp"
#include "aqa/rng.hpp"
#include "json.hpp"

namespace aqa {

namespace {

void check_config(const SyntheticConfig& c) {
    if (c.num_types == 0 || c.videos_per_type == 0 || c.clips == 0 || c.dim == 0)
        throw ConfigError("synthetic config: counts must be positive");
    if (c.fault_probability < 0 || c.fault_probability > 1)
        throw ConfigError("synthetic config: fault_probability outside [0,1]");
    if (c.deviation_sigma < 0)
        throw ConfigError("synthetic config: deviation_sigma must be >= 0");
    if (c.max_score <= 0) throw ConfigError("synthetic config: max_score must be positive");
    if (c.train_dml_fraction < 0 || c.train_score_fraction < 0 ||
        c.train_dml_fraction + c.train_score_fraction > 1.0)
        throw ConfigError("synthetic config: split fractions must be >= 0 and sum <= 1");
}

// random direction of unit norm
std::vector<double> unit_vector(Rng& rng, std::size_t dim) {
    std::vector<double> v(dim);
    double norm2 = 0.0;
    do {
        norm2 = 0.0;
        for (double& x : v) {
            x = rng.normal();
            norm2 += x * x;
        }
    } while (norm2 == 0.0);
    double inv = 1.0 / std::sqrt(norm2);
    for (double& x : v) x *= inv;
    return v;
}

std::string type_prefix(std::size_t t) { return "t" + std::to_string(t); }

std::string video_id(std::size_t t, std::size_t v) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "_v%03zu", v);
    return type_prefix(t) + buf;
}

}  // namespace

const GeneratedVideo* GeneratedDataset::find(std::string_view id) const {
    for (const auto& v : videos)
        if (v.row.id == id) return &v;
    return nullptr;
}

double planted_score(const SyntheticConfig& config, const std::vector<double>& clip_norms) {
    double total = 0.0;
    for (double n : clip_norms) total += n;
    double s = config.max_score - config.score_penalty * total;
    if (s < 0.0) s = 0.0;
    if (s > config.max_score) s = config.max_score;
    return s;
}

GeneratedDataset generate_dataset(const SyntheticConfig& config) {
    check_config(config);
    GeneratedDataset dataset;
    dataset.config = config;

    std::size_t n_dml =
        static_cast<std::size_t>(std::round(config.train_dml_fraction *
                                            static_cast<double>(config.videos_per_type)));
    std::size_t n_score = static_cast<std::size_t>(
        std::round((config.train_dml_fraction + config.train_score_fraction) *
                   static_cast<double>(config.videos_per_type)));

    for (std::size_t t = 0; t < config.num_types; ++t) {
        Rng proto_rng(derive_seed(config.seed, "prototype/" + std::to_string(t)));
        std::vector<double> prototype(config.clips * config.dim);
        for (double& x : prototype) x = config.prototype_scale * proto_rng.normal();

        auto make_video = [&](const std::string& id, Split split) {
            GeneratedVideo video;
            video.row.id = id;
            video.row.path = "features/" + id + ".aqaf";
            video.row.action_type = static_cast<int>(t);
            video.row.split = split;
            video.features.dim = config.dim;
            video.features.data.assign(prototype.begin(), prototype.end());
            video.clip_deviation_norms.assign(config.clips, 0.0);
            return video;
        };

        // reference performance: the prototype itself, top score
        GeneratedVideo expert = make_video(type_prefix(t) + "_expert", Split::TrainScore);
        expert.is_expert = true;
        expert.row.overall_score = config.max_score;
        dataset.videos.push_back(std::move(expert));

        for (std::size_t v = 0; v < config.videos_per_type; ++v) {
            std::string id = video_id(t, v);
            Split split = v < n_dml ? Split::TrainDml
                                    : (v < n_score ? Split::TrainScore : Split::Test);
            GeneratedVideo video = make_video(id, split);

            Rng rng(derive_seed(config.seed, "video/" + id));
            double sloppiness = rng.uniform();
            for (std::size_t j = 0; j < config.clips; ++j) {
                std::vector<double> deviation = unit_vector(rng, config.dim);
                double base_norm = sloppiness * config.deviation_sigma;
                for (double& x : deviation) x *= base_norm;
                if (rng.uniform() < config.fault_probability) {
                    auto fault = unit_vector(rng, config.dim);
                    for (std::size_t d = 0; d < config.dim; ++d)
                        deviation[d] += config.fault_magnitude * fault[d];
                    video.fault_clips.push_back(j + 1);
                }
                double norm2 = 0.0;
                for (std::size_t d = 0; d < config.dim; ++d) {
                    video.features.data[j * config.dim + d] += deviation[d];
                    norm2 += deviation[d] * deviation[d];
                }
                video.clip_deviation_norms[j] = std::sqrt(norm2);
            }
            video.row.overall_score = planted_score(config, video.clip_deviation_norms);
            dataset.videos.push_back(std::move(video));
        }
    }

    // feature files carry float32; round now so memory and disk agree
    for (auto& video : dataset.videos)
        for (double& x : video.features.data) x = static_cast<float>(x);

    return dataset;
}

void write_dataset(const GeneratedDataset& dataset, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir / "features");

    DatasetManifest manifest;
    manifest.source_path = dir / "manifest.csv";
    for (const auto& video : dataset.videos) {
        manifest.rows.push_back(video.row);
        FeatureFile file;
        file.id = video.row.id;
        file.action_type = static_cast<std::uint32_t>(video.row.action_type);
        file.features = video.features;
        write_features(dir / video.row.path, file);
    }
    write_manifest(manifest.source_path, manifest);

    std::ofstream faults(dir / "faults.csv");
    if (!faults) throw ParseError("cannot write faults.csv under " + dir.string());
    faults << "id,clip_index\n";
    for (const auto& video : dataset.videos)
        for (std::size_t j : video.fault_clips) faults << video.row.id << ',' << j << "\n";

    std::ofstream cfg(dir / "gen_config.json");
    if (!cfg) throw ParseError("cannot write gen_config.json under " + dir.string());
    cfg << synthetic_config_to_json(dataset.config);
}

std::string synthetic_config_to_json(const SyntheticConfig& c) {
    nlohmann::ordered_json j;
    j["num_types"] = c.num_types;
    j["videos_per_type"] = c.videos_per_type;
    j["clips"] = c.clips;
    j["dim"] = c.dim;
    j["prototype_scale"] = c.prototype_scale;
    j["deviation_sigma"] = c.deviation_sigma;
    j["fault_probability"] = c.fault_probability;
    j["fault_magnitude"] = c.fault_magnitude;
    j["score_penalty"] = c.score_penalty;
    j["max_score"] = c.max_score;
    j["train_dml_fraction"] = c.train_dml_fraction;
    j["train_score_fraction"] = c.train_score_fraction;
    j["seed"] = c.seed;
    return j.dump(2) + "\n";
}

SyntheticConfig synthetic_config_from_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open synthetic config: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    SyntheticConfig c;
    c.num_types = j.value("num_types", c.num_types);
    c.videos_per_type = j.value("videos_per_type", c.videos_per_type);
    c.clips = j.value("clips", c.clips);
    c.dim = j.value("dim", c.dim);
    c.prototype_scale = j.value("prototype_scale", c.prototype_scale);
    c.deviation_sigma = j.value("deviation_sigma", c.deviation_sigma);
    c.fault_probability = j.value("fault_probability", c.fault_probability);
    c.fault_magnitude = j.value("fault_magnitude", c.fault_magnitude);
    c.score_penalty = j.value("score_penalty", c.score_penalty);
    c.max_score = j.value("max_score", c.max_score);
    c.train_dml_fraction = j.value("train_dml_fraction", c.train_dml_fraction);
    c.train_score_fraction = j.value("train_score_fraction", c.train_score_fraction);
    c.seed = j.value("seed", c.seed);
    check_config(c);
    return c;
}

int oracle_pair_label(const GeneratedVideo& a, const GeneratedVideo& b, double threshold) {
    return std::abs(a.row.overall_score - b.row.overall_score) < threshold ? 1 : 0;
}

std::map<std::string, std::set<std::size_t>> fault_index(const GeneratedDataset& dataset) {
    std::map<std::string, std::set<std::size_t>> index;
    for (const auto& video : dataset.videos)
        if (!video.fault_clips.empty())
            index[video.row.id] =
                std::set<std::size_t>(video.fault_clips.begin(), video.fault_clips.end());
    return index;
}

}  // namespace aqa
