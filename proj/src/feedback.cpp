#include "aqa/feedback.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "aqa/dataset.hpp"
#include "aqa/errors.hpp"

namespace aqa {

ClipFeatureSequence trim_for_clip(const ClipFeatureSequence& seq, std::size_t j) {
    std::size_t n = seq.clip_count();
    if (j < 1 || j > n)
        throw ShapeError("trim_for_clip: clip index " + std::to_string(j) +
                         " outside 1.." + std::to_string(n));
    ClipFeatureSequence out;
    out.dim = seq.dim;
    out.clip_frames = seq.clip_frames;
    out.data.assign((j - 1) * seq.dim, 0.0);
    auto clip = seq.clip(j - 1);
    out.data.insert(out.data.end(), clip.begin(), clip.end());
    return out;
}

double clip_similarity(const SiameseNet& net, const ClipFeatureSequence& expert_seq,
                       const ClipFeatureSequence& test_seq, std::size_t j) {
    if (expert_seq.clip_count() != test_seq.clip_count())
        throw ShapeError("clip_similarity: sequences must share length, got " +
                         std::to_string(expert_seq.clip_count()) + " and " +
                         std::to_string(test_seq.clip_count()));
    return net.forward(trim_for_clip(expert_seq, j), trim_for_clip(test_seq, j));
}

std::vector<std::size_t> faulty_clips(const std::vector<double>& similarities,
                                      double threshold) {
    std::vector<std::size_t> indices;
    for (std::size_t k = 0; k < similarities.size(); ++k)
        if (similarities[k] < threshold) indices.push_back(k + 1);
    return indices;
}

std::vector<ClipFeedback> feedback_for_video(const SiameseNet& net,
                                             const ClipFeatureSequence& expert_seq,
                                             const ClipFeatureSequence& test_seq,
                                             double threshold) {
    std::vector<ClipFeedback> feedback;
    std::size_t n = test_seq.clip_count();
    feedback.reserve(n);
    for (std::size_t j = 1; j <= n; ++j) {
        ClipFeedback fb;
        fb.clip_index = j;
        fb.similarity = clip_similarity(net, expert_seq, test_seq, j);
        fb.faulty = fb.similarity < threshold;
        fb.padded = test_seq.clip_is_zero(j - 1);
        feedback.push_back(fb);
    }
    return feedback;
}

void write_feedback_csv(const std::filesystem::path& path,
                        const std::vector<ClipFeedback>& feedback) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write feedback csv: " + path.string());
    out << "clip_index,similarity,faulty,padded\n";
    for (const auto& fb : feedback)
        out << fb.clip_index << ',' << format_double(fb.similarity) << ','
            << (fb.faulty ? 1 : 0) << ',' << (fb.padded ? 1 : 0) << "\n";
}

std::vector<ClipFeedback> load_feedback_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open feedback csv: " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != "clip_index,similarity,faulty,padded")
        throw ParseError(path.string() + ": bad feedback csv header");
    std::vector<ClipFeedback> feedback;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string f0, f1, f2, f3;
        if (!std::getline(ss, f0, ',') || !std::getline(ss, f1, ',') ||
            !std::getline(ss, f2, ',') || !std::getline(ss, f3))
            throw ParseError(path.string() + " row " + std::to_string(row) +
                             ": expected 4 fields");
        ClipFeedback fb;
        fb.clip_index = std::stoul(f0);
        auto res = std::from_chars(f1.data(), f1.data() + f1.size(), fb.similarity);
        if (res.ec != std::errc{})
            throw ParseError(path.string() + " row " + std::to_string(row) +
                             ": bad similarity");
        fb.faulty = f2 == "1";
        fb.padded = f3 == "1";
        feedback.push_back(fb);
    }
    return feedback;
}

void write_feedback_svg(const std::filesystem::path& path,
                        const std::vector<ClipFeedback>& feedback) {
    constexpr double kW = 480, kH = 280, kPad = 40;
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write feedback svg: " + path.string());

    std::size_t n = feedback.size();
    auto x_of = [&](std::size_t j) {
        return n <= 1 ? kPad + (kW - 2 * kPad) / 2
                      : kPad + (kW - 2 * kPad) * static_cast<double>(j - 1) /
                                   static_cast<double>(n - 1);
    };
    auto y_of = [&](double sim) { return kH - kPad - (kH - 2 * kPad) * sim; };

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\""
        << kH << "\" viewBox=\"0 0 " << kW << ' ' << kH << "\">\n";
    out << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    // axes
    out << "  <line x1=\"" << kPad << "\" y1=\"" << kH - kPad << "\" x2=\"" << kW - kPad
        << "\" y2=\"" << kH - kPad << "\" stroke=\"black\"/>\n";
    out << "  <line x1=\"" << kPad << "\" y1=\"" << kPad << "\" x2=\"" << kPad
        << "\" y2=\"" << kH - kPad << "\" stroke=\"black\"/>\n";
    // decision rule at 0.5
    out << "  <line x1=\"" << kPad << "\" y1=\"" << y_of(0.5) << "\" x2=\"" << kW - kPad
        << "\" y2=\"" << y_of(0.5)
        << "\" stroke=\"red\" stroke-dasharray=\"6,4\"/>\n";

    if (!feedback.empty()) {
        out << "  <polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"";
        for (const auto& fb : feedback)
            out << x_of(fb.clip_index) << ',' << y_of(fb.similarity) << ' ';
        out << "\"/>\n";
        for (const auto& fb : feedback) {
            out << "  <circle cx=\"" << x_of(fb.clip_index) << "\" cy=\""
                << y_of(fb.similarity) << "\" r=\"3\" fill=\""
                << (fb.faulty ? "red" : (fb.padded ? "gray" : "steelblue")) << "\"/>\n";
            out << "  <text x=\"" << x_of(fb.clip_index) << "\" y=\"" << kH - kPad + 16
                << "\" font-size=\"10\" text-anchor=\"middle\">" << fb.clip_index
                << "</text>\n";
        }
    }
    out << "  <text x=\"" << kW / 2 << "\" y=\"" << kH - 6
        << "\" font-size=\"11\" text-anchor=\"middle\">clip</text>\n";
    out << "  <text x=\"12\" y=\"" << kH / 2
        << "\" font-size=\"11\" text-anchor=\"middle\" transform=\"rotate(-90 12 "
        << kH / 2 << ")\">similarity</text>\n";
    out << "</svg>\n";
}

}  // namespace aqa
