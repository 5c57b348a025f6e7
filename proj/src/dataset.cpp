#include "aqa/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "aqa/errors.hpp"

namespace aqa {

Split split_from_string(std::string_view s) {
    if (s == "train_dml") return Split::TrainDml;
    if (s == "train_score") return Split::TrainScore;
    if (s == "test") return Split::Test;
    throw ParseError("unknown split tag: '" + std::string(s) + "'");
}

std::string_view split_name(Split s) {
    switch (s) {
        case Split::TrainDml: return "train_dml";
        case Split::TrainScore: return "train_score";
        case Split::Test: return "test";
    }
    return "train_dml";
}

std::string format_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

constexpr std::string_view kHeader =
    "id,path,action_type,overall_score,split,judge_scores,difficulty";

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (c != '\r') {
            field.push_back(c);
        }
    }
    fields.push_back(std::move(field));
    return fields;
}

double parse_double_field(const std::string& s, std::size_t row, const char* what) {
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw ParseError("manifest row " + std::to_string(row) + ": bad " + what + " '" +
                         s + "'");
    if (!std::isfinite(v))
        throw ParseError("manifest row " + std::to_string(row) + ": non-finite " + what);
    return v;
}

int parse_int_field(const std::string& s, std::size_t row, const char* what) {
    int v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw ParseError("manifest row " + std::to_string(row) + ": bad " + what + " '" +
                         s + "'");
    return v;
}

}  // namespace

const ManifestRow* DatasetManifest::find(std::string_view id) const {
    for (const auto& r : rows)
        if (r.id == id) return &r;
    return nullptr;
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open manifest: " + path.string());

    DatasetManifest manifest;
    manifest.source_path = path;

    std::string line;
    if (!std::getline(in, line))
        throw ParseError(path.string() + ": empty manifest");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kHeader)
        throw ParseError(path.string() + ": unexpected header '" + line + "'");

    std::set<std::string> seen;
    std::size_t row_number = 1;
    while (std::getline(in, line)) {
        ++row_number;
        if (line.empty() || line == "\r") continue;
        auto fields = split_csv_line(line);
        if (fields.size() != 7)
            throw ParseError(path.string() + " row " + std::to_string(row_number) +
                             ": expected 7 fields, got " + std::to_string(fields.size()));

        ManifestRow row;
        row.id = fields[0];
        row.path = fields[1];
        if (row.id.empty())
            throw ParseError(path.string() + " row " + std::to_string(row_number) +
                             ": empty id");
        if (!seen.insert(row.id).second)
            throw ParseError(path.string() + " row " + std::to_string(row_number) +
                             ": duplicate id '" + row.id + "'");
        row.action_type = parse_int_field(fields[2], row_number, "action_type");
        row.overall_score = parse_double_field(fields[3], row_number, "overall_score");
        row.split = split_from_string(fields[4]);
        if (!fields[5].empty()) {
            std::stringstream ss(fields[5]);
            std::string part;
            while (std::getline(ss, part, ';'))
                row.judge_scores.push_back(
                    parse_double_field(part, row_number, "judge score"));
        }
        if (!fields[6].empty())
            row.difficulty = parse_double_field(fields[6], row_number, "difficulty");
        manifest.rows.push_back(std::move(row));
    }
    return manifest;
}

void write_manifest(const std::filesystem::path& path, const DatasetManifest& manifest) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open manifest for writing: " + path.string());
    out << kHeader << "\n";
    for (const auto& r : manifest.rows) {
        out << r.id << ',' << r.path << ',' << r.action_type << ','
            << format_double(r.overall_score) << ',' << split_name(r.split) << ',';
        for (std::size_t i = 0; i < r.judge_scores.size(); ++i) {
            if (i) out << ';';
            out << format_double(r.judge_scores[i]);
        }
        out << ',';
        if (r.difficulty) out << format_double(*r.difficulty);
        out << "\n";
    }
    if (!out) throw ParseError("manifest write failed: " + path.string());
}

std::vector<VideoRecord> load_videos(const DatasetManifest& manifest, const LoadOptions& opts) {
    std::vector<VideoRecord> videos;
    std::filesystem::path base = manifest.source_path.parent_path();

    for (const auto& row : manifest.rows) {
        if (opts.split && row.split != *opts.split) continue;

        VideoRecord video;
        video.id = row.id;
        video.action_type = row.action_type;
        video.overall_score = row.overall_score;
        video.judge_scores = row.judge_scores;
        video.difficulty = row.difficulty;
        video.split = row.split;

        if (opts.max_score > 0 &&
            (row.overall_score < 0.0 || row.overall_score > opts.max_score))
            throw ParseError("video '" + row.id + "': score " +
                             format_double(row.overall_score) + " outside [0, " +
                             format_double(opts.max_score) + "]");

        FeatureFile file = load_features(base / row.path);
        if (file.id != row.id)
            throw ParseError("video '" + row.id + "': feature file carries id '" +
                             file.id + "'");
        video.features = std::move(file.features);

        if (opts.pad_to > 0) {
            if (video.features.clip_count() > opts.pad_to) {
                if (!opts.allow_truncation)
                    throw ShapeError("video '" + row.id + "': " +
                                     std::to_string(video.features.clip_count()) +
                                     " clips exceed configured length " +
                                     std::to_string(opts.pad_to));
                video.features = truncate_front(video.features, opts.pad_to);
            } else {
                video.features = pad_to_length(video.features, opts.pad_to);
            }
        }
        videos.push_back(std::move(video));
    }

    // manifest order is kept stable for downstream determinism
    return videos;
}

}  // namespace aqa
