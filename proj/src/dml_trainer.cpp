#include "aqa/dml_trainer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "aqa/dataset.hpp"
#include "aqa/errors.hpp"

namespace aqa {

namespace {

// Synthetic balancing variants carry their source id before '#'.
std::string_view base_id(std::string_view id) {
    auto pos = id.find('#');
    return pos == std::string_view::npos ? id : id.substr(0, pos);
}

bool is_synthetic(std::string_view id) { return id.find('#') != std::string_view::npos; }

std::vector<LabeledPair> stratified_cap(const std::vector<LabeledPair>& pairs,
                                        std::size_t cap, Rng& rng) {
    if (cap == 0 || pairs.size() <= cap) return pairs;
    std::vector<std::size_t> pos, neg;
    for (std::size_t k = 0; k < pairs.size(); ++k)
        (pairs[k].label == 1 ? pos : neg).push_back(k);
    double frac = static_cast<double>(cap) / static_cast<double>(pairs.size());
    rng.shuffle(pos);
    rng.shuffle(neg);
    std::size_t keep_pos = static_cast<std::size_t>(std::round(frac * pos.size()));
    keep_pos = std::min(std::max<std::size_t>(keep_pos, pos.empty() ? 0 : 1), pos.size());
    std::size_t keep_neg = std::min(cap - std::min(cap, keep_pos), neg.size());

    std::vector<std::size_t> chosen(pos.begin(), pos.begin() + keep_pos);
    chosen.insert(chosen.end(), neg.begin(), neg.begin() + keep_neg);
    std::sort(chosen.begin(), chosen.end());
    std::vector<LabeledPair> out;
    out.reserve(chosen.size());
    for (std::size_t k : chosen) out.push_back(pairs[k]);
    return out;
}

// Equal positive/negative subsample for an honest accuracy number.
std::vector<LabeledPair> balanced_eval_subsample(const std::vector<LabeledPair>& pairs,
                                                 std::size_t cap, Rng& rng) {
    std::vector<std::size_t> pos, neg;
    for (std::size_t k = 0; k < pairs.size(); ++k)
        (pairs[k].label == 1 ? pos : neg).push_back(k);
    if (pos.empty() || neg.empty()) return pairs;
    rng.shuffle(pos);
    rng.shuffle(neg);
    std::size_t per_class = std::min(pos.size(), neg.size());
    if (cap > 0) per_class = std::min(per_class, cap / 2);
    std::vector<std::size_t> chosen(pos.begin(), pos.begin() + per_class);
    chosen.insert(chosen.end(), neg.begin(), neg.begin() + per_class);
    std::sort(chosen.begin(), chosen.end());
    std::vector<LabeledPair> out;
    out.reserve(chosen.size());
    for (std::size_t k : chosen) out.push_back(pairs[k]);
    return out;
}

}  // namespace

std::vector<std::pair<std::size_t, int>> epoch_schedule(std::size_t pair_count,
                                                        bool symmetrize, Rng& rng) {
    std::vector<std::pair<std::size_t, int>> schedule;
    schedule.reserve(pair_count * (symmetrize ? 2 : 1));
    for (std::size_t k = 0; k < pair_count; ++k) {
        schedule.emplace_back(k, 0);
        if (symmetrize) schedule.emplace_back(k, 1);
    }
    rng.shuffle(schedule);
    return schedule;
}

double pair_accuracy(const SiameseNet& net, const std::vector<LabeledPair>& pairs,
                     const std::map<std::string, const VideoRecord*>& by_id) {
    if (pairs.empty()) return 0.0;
    std::size_t correct = 0;
    for (const auto& pair : pairs) {
        double p = net.forward(by_id.at(pair.id_p)->features, by_id.at(pair.id_q)->features);
        int predicted = p > 0.5 ? 1 : 0;
        if (predicted == pair.label) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(pairs.size());
}

DmlTrainResult train_dml(SiameseNet& net, const std::vector<LabeledPair>& pairs,
                         const std::vector<VideoRecord>& videos, const DmlTrainConfig& cfg) {
    if (pairs.empty()) throw ConfigError("train_dml: no pairs");
    bool has_pos = false, has_neg = false;
    for (const auto& p : pairs) (p.label == 1 ? has_pos : has_neg) = true;
    if (!has_pos || !has_neg)
        throw ConfigError("train_dml: both labels must be present in the pair list");

    std::map<std::string, const VideoRecord*> by_id;
    for (const auto& v : videos) by_id[v.id] = &v;
    for (const auto& p : pairs)
        if (!by_id.count(p.id_p) || !by_id.count(p.id_q))
            throw ConfigError("train_dml: pair references a video not in the pool");

    // partition base ids so no video straddles the holdout boundary
    std::set<std::string> base_ids;
    for (const auto& p : pairs) {
        base_ids.insert(std::string(base_id(p.id_p)));
        base_ids.insert(std::string(base_id(p.id_q)));
    }
    std::vector<std::string> id_order(base_ids.begin(), base_ids.end());
    Rng split_rng(derive_seed(cfg.seed, "holdout-split"));
    split_rng.shuffle(id_order);
    double video_fraction =
        cfg.holdout_pair_fraction > 0 ? std::sqrt(cfg.holdout_pair_fraction) : 0.0;
    std::size_t holdout_n =
        static_cast<std::size_t>(std::round(video_fraction * id_order.size()));
    if (cfg.holdout_pair_fraction > 0 && id_order.size() >= 4)
        holdout_n = std::max<std::size_t>(holdout_n, 2);
    std::set<std::string> holdout_ids(id_order.begin(), id_order.begin() + holdout_n);

    std::vector<LabeledPair> train_raw, holdout_raw;
    for (const auto& p : pairs) {
        bool p_out = holdout_ids.count(std::string(base_id(p.id_p))) > 0;
        bool q_out = holdout_ids.count(std::string(base_id(p.id_q))) > 0;
        if (!p_out && !q_out) {
            train_raw.push_back(p);
        } else if (p_out && q_out && !is_synthetic(p.id_p) && !is_synthetic(p.id_q)) {
            holdout_raw.push_back(p);
        }
    }
    if (train_raw.empty()) throw ConfigError("train_dml: holdout split left no training pairs");

    Rng prep_rng(derive_seed(cfg.seed, "prep"));
    train_raw = stratified_cap(train_raw, cfg.max_train_pairs, prep_rng);

    std::vector<VideoRecord> pool(videos);
    std::vector<LabeledPair> train_pairs;
    if (cfg.balance) {
        bool train_has_pos = false;
        for (const auto& p : train_raw) train_has_pos |= p.label == 1;
        if (!train_has_pos)
            throw ConfigError("train_dml: no positive pairs left to balance");
        BalanceOptions bopts;
        bopts.target_positive_count = cfg.balance_target;
        bopts.jitter_sigma = cfg.jitter_sigma;
        bopts.seed = derive_seed(cfg.seed, "balance");
        bopts.align_to = cfg.sequence_length;
        BalanceResult balanced = balance_pairs(train_raw, pool, bopts);
        train_pairs = std::move(balanced.pairs);
        for (auto& v : balanced.synthetic_videos) pool.push_back(std::move(v));
        by_id.clear();
        for (const auto& v : pool) by_id[v.id] = &v;
    } else {
        train_pairs = std::move(train_raw);
    }

    std::vector<LabeledPair> holdout_eval = balanced_eval_subsample(
        holdout_raw, cfg.max_holdout_pairs, prep_rng);

    DmlTrainResult result;
    result.train_pairs = train_pairs.size();
    result.holdout_pairs = holdout_eval.size();

    OptimizerState opt;
    opt.kind = cfg.optimizer;
    opt.learning_rate = cfg.learning_rate;
    GradientTape tape(net.params());

    ParameterSet best_params = net.params();
    double best_accuracy = -1.0;
    std::size_t best_epoch = 0;
    std::size_t since_best = 0;

    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        Rng epoch_rng(derive_seed(cfg.seed, "epoch/" + std::to_string(epoch)));
        auto schedule = epoch_schedule(train_pairs.size(), cfg.symmetrize, epoch_rng);

        double epoch_loss = 0.0;
        std::size_t examples = 0;
        bool aborted = false;
        for (std::size_t start = 0; start < schedule.size(); start += cfg.batch_size) {
            std::size_t end = std::min(start + cfg.batch_size, schedule.size());
            double inv = 1.0 / static_cast<double>(end - start);
            tape.zero();
            double batch_loss = 0.0;
            for (std::size_t k = start; k < end; ++k) {
                const auto& [idx, order] = schedule[k];
                const LabeledPair& pair = train_pairs[idx];
                const VideoRecord* a = by_id.at(order ? pair.id_q : pair.id_p);
                const VideoRecord* b = by_id.at(order ? pair.id_p : pair.id_q);
                SiameseTrace trace;
                double prob = net.forward(a->features, b->features, &trace);
                LossValue lv = bce_loss(prob, pair.label);
                batch_loss += lv.loss;
                net.backward(trace, lv.grad * inv, tape);
            }
            if (!std::isfinite(batch_loss)) {
                aborted = true;
                break;
            }
            try {
                optimizer_step(opt, net.params(), tape);
            } catch (const NumericError&) {
                aborted = true;
                break;
            }
            epoch_loss += batch_loss;
            examples += end - start;
        }
        if (aborted) {
            net.params() = best_params;
            result.diverged = true;
            break;
        }

        DmlEpochStats stats;
        stats.epoch = epoch;
        stats.mean_loss = examples ? epoch_loss / static_cast<double>(examples) : 0.0;
        stats.holdout_accuracy =
            holdout_eval.empty() ? 0.0 : pair_accuracy(net, holdout_eval, by_id);
        result.history.push_back(stats);

        double measure = holdout_eval.empty() ? -stats.mean_loss : stats.holdout_accuracy;
        if (measure > best_accuracy) {
            best_accuracy = measure;
            best_epoch = epoch;
            best_params = net.params();
            since_best = 0;
        } else {
            ++since_best;
            if (cfg.patience > 0 && since_best >= cfg.patience) break;
        }
    }

    net.params() = best_params;
    result.best_epoch = best_epoch;
    result.best_accuracy = holdout_eval.empty() ? 0.0 : best_accuracy;
    return result;
}

void write_history_csv(const std::filesystem::path& path,
                       const std::vector<DmlEpochStats>& history) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write history: " + path.string());
    out << "epoch,loss,holdout_accuracy\n";
    for (const auto& h : history)
        out << h.epoch << ',' << format_double(h.mean_loss) << ','
            << format_double(h.holdout_accuracy) << "\n";
}

}  // namespace aqa
