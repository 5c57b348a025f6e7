#include "aqa/experts.hpp"

#include <algorithm>

#include "aqa/errors.hpp"

namespace aqa {

ExpertMode expert_mode_from_string(std::string_view s) {
    if (s == "best") return ExpertMode::BestPerType;
    if (s == "worst") return ExpertMode::WorstPerType;
    if (s == "constant") return ExpertMode::Constant;
    throw ConfigError("unknown expert mode: '" + std::string(s) +
                      "' (expected best|worst|constant)");
}

std::string_view expert_mode_name(ExpertMode m) {
    switch (m) {
        case ExpertMode::BestPerType: return "best";
        case ExpertMode::WorstPerType: return "worst";
        case ExpertMode::Constant: return "constant";
    }
    return "best";
}

const std::vector<std::string>& ExpertRegistry::for_type(int action_type) const {
    auto it = references.find(action_type);
    if (it == references.end() || it->second.empty())
        throw MissingDependencyError("no expert registered for action type " +
                                     std::to_string(action_type));
    return it->second;
}

ExpertRegistry select_experts(const std::vector<VideoRecord>& videos, ExpertMode mode,
                              std::optional<int> designated_type) {
    if (videos.empty()) throw ConfigError("select_experts: no videos");

    // collect per-type extremes; ties all register
    std::map<int, double> extreme;
    for (const auto& v : videos) {
        auto [it, inserted] = extreme.try_emplace(v.action_type, v.overall_score);
        if (inserted) continue;
        if (mode == ExpertMode::WorstPerType)
            it->second = std::min(it->second, v.overall_score);
        else
            it->second = std::max(it->second, v.overall_score);
    }

    std::map<int, std::vector<std::string>> picks;
    for (const auto& v : videos)
        if (v.overall_score == extreme.at(v.action_type))
            picks[v.action_type].push_back(v.id);
    for (auto& [type, ids] : picks) std::sort(ids.begin(), ids.end());

    ExpertRegistry registry;
    registry.mode = mode;
    if (mode == ExpertMode::Constant) {
        int anchor = designated_type ? *designated_type : picks.begin()->first;
        auto it = picks.find(anchor);
        if (it == picks.end())
            throw ConfigError("select_experts: designated type " + std::to_string(anchor) +
                              " has no videos");
        for (const auto& [type, ids] : picks) registry.references[type] = it->second;
    } else {
        registry.references = std::move(picks);
    }
    return registry;
}

}  // namespace aqa
