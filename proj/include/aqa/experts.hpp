#pragma once

#include <map>
#include <string>
#include <vector>

#include "aqa/dataset.hpp"

namespace aqa {

enum class ExpertMode { BestPerType, WorstPerType, Constant };

ExpertMode expert_mode_from_string(std::string_view s);
std::string_view expert_mode_name(ExpertMode m);

// Reference performances per action type. In best/worst modes every video
// attaining the per-type extreme score is registered (ties included); in
// constant mode the best performer of one designated type serves all
// types.
struct ExpertRegistry {
    ExpertMode mode = ExpertMode::BestPerType;
    std::map<int, std::vector<std::string>> references;  // action type -> video ids

    const std::vector<std::string>& for_type(int action_type) const;
};

// `designated_type` only matters in constant mode; by default the lowest
// action type present is designated.
ExpertRegistry select_experts(const std::vector<VideoRecord>& videos, ExpertMode mode,
                              std::optional<int> designated_type = std::nullopt);

}  // namespace aqa
