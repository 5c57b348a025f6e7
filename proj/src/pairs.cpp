#include "aqa/pairs.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "aqa/errors.hpp"
#include "aqa/rng.hpp"

namespace aqa {

std::vector<LabeledPair> make_pairs(const std::vector<VideoRecord>& videos, double threshold) {
    if (threshold <= 0) throw ConfigError("make_pairs: threshold must be positive");
    std::vector<LabeledPair> pairs;
    if (videos.size() < 2) return pairs;

    std::vector<const VideoRecord*> sorted;
    sorted.reserve(videos.size());
    for (const auto& v : videos) sorted.push_back(&v);
    std::sort(sorted.begin(), sorted.end(),
              [](const VideoRecord* a, const VideoRecord* b) { return a->id < b->id; });
    for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
        if (sorted[i]->id == sorted[i + 1]->id)
            throw ConfigError("make_pairs: duplicate video id '" + sorted[i]->id + "'");
    }

    pairs.reserve(sorted.size() * (sorted.size() - 1) / 2);
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        for (std::size_t j = i + 1; j < sorted.size(); ++j) {
            LabeledPair p;
            p.id_p = sorted[i]->id;
            p.id_q = sorted[j]->id;
            p.label =
                std::abs(sorted[i]->overall_score - sorted[j]->overall_score) < threshold
                    ? 1
                    : 0;
            pairs.push_back(std::move(p));
        }
    }
    return pairs;
}

AugmentKind augment_kind_from_string(std::string_view s) {
    if (s == "clip_drop") return AugmentKind::ClipDrop;
    if (s == "clip_duplicate") return AugmentKind::ClipDuplicate;
    if (s == "feature_jitter") return AugmentKind::FeatureJitter;
    throw ConfigError("unknown augmentation kind: " + std::string(s));
}

ClipFeatureSequence augment_sequence(const ClipFeatureSequence& seq, AugmentKind kind,
                                     std::uint64_t seed, double jitter_sigma) {
    Rng rng(seed);
    ClipFeatureSequence out;
    out.dim = seq.dim;
    out.clip_frames = seq.clip_frames;
    std::size_t n = seq.clip_count();

    switch (kind) {
        case AugmentKind::ClipDrop: {
            if (n < 2)
                throw ShapeError("clip_drop needs at least 2 clips, sequence has " +
                                 std::to_string(n));
            std::size_t drop = rng.index(n);
            out.data.reserve((n - 1) * seq.dim);
            for (std::size_t t = 0; t < n; ++t) {
                if (t == drop) continue;
                auto clip = seq.clip(t);
                out.data.insert(out.data.end(), clip.begin(), clip.end());
            }
            break;
        }
        case AugmentKind::ClipDuplicate: {
            std::size_t dup = rng.index(n);
            out.data.reserve((n + 1) * seq.dim);
            for (std::size_t t = 0; t < n; ++t) {
                auto clip = seq.clip(t);
                out.data.insert(out.data.end(), clip.begin(), clip.end());
                if (t == dup) out.data.insert(out.data.end(), clip.begin(), clip.end());
            }
            break;
        }
        case AugmentKind::FeatureJitter: {
            out.data = seq.data;
            if (jitter_sigma != 0.0)
                for (double& v : out.data) v += rng.normal(0.0, jitter_sigma);
            break;
        }
    }
    return out;
}

BalanceResult balance_pairs(const std::vector<LabeledPair>& pairs,
                            const std::vector<VideoRecord>& videos,
                            const BalanceOptions& opts) {
    BalanceResult result;
    result.pairs = pairs;
    for (const auto& p : pairs) (p.label == 1 ? result.positives : result.negatives)++;
    if (result.positives == 0)
        throw ConfigError("balance_pairs: no positive pairs to replicate");

    std::size_t target = opts.target_positive_count == 0 ? result.negatives
                                                         : opts.target_positive_count;
    target = std::min(target, std::max(result.negatives, result.positives));

    std::map<std::string, const VideoRecord*> by_id;
    for (const auto& v : videos) by_id[v.id] = &v;

    std::vector<const LabeledPair*> positives;
    for (const auto& p : pairs)
        if (p.label == 1) positives.push_back(&p);

    Rng rng(opts.seed);
    const AugmentKind kinds[] = {AugmentKind::ClipDrop, AugmentKind::ClipDuplicate,
                                 AugmentKind::FeatureJitter};
    std::size_t serial = 0;

    auto variant_of = [&](const std::string& id) -> std::string {
        auto it = by_id.find(id);
        if (it == by_id.end())
            throw ConfigError("balance_pairs: pair references unknown video '" + id + "'");
        const VideoRecord& src = *it->second;

        AugmentKind kind = kinds[rng.index(3)];
        if (kind == AugmentKind::ClipDrop && src.features.clip_count() < 2)
            kind = AugmentKind::FeatureJitter;

        VideoRecord copy = src;
        copy.id = src.id + "#aug" + std::to_string(serial++);
        copy.features = augment_sequence(src.features, kind, rng.raw(), opts.jitter_sigma);
        if (opts.align_to > 0) {
            if (copy.features.clip_count() > opts.align_to)
                copy.features = truncate_front(copy.features, opts.align_to);
            else
                copy.features = pad_to_length(copy.features, opts.align_to);
        }
        result.synthetic_videos.push_back(std::move(copy));
        return result.synthetic_videos.back().id;
    };

    while (result.positives < target) {
        const LabeledPair& base = *positives[rng.index(positives.size())];
        LabeledPair synth;
        // vary one or both members
        switch (rng.index(3)) {
            case 0:
                synth.id_p = variant_of(base.id_p);
                synth.id_q = base.id_q;
                break;
            case 1:
                synth.id_p = base.id_p;
                synth.id_q = variant_of(base.id_q);
                break;
            default:
                synth.id_p = variant_of(base.id_p);
                synth.id_q = variant_of(base.id_q);
                break;
        }
        synth.label = 1;
        result.pairs.push_back(std::move(synth));
        ++result.positives;
    }
    return result;
}

}  // namespace aqa
