#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "aqa/params.hpp"

namespace aqa {

enum class OptimizerKind { Sgd, Adam };

OptimizerKind optimizer_from_string(std::string_view s);

// Update-rule state. Moment accumulators are allocated lazily per block,
// shape-matched, and keyed by block name.
struct OptimizerState {
    OptimizerKind kind = OptimizerKind::Adam;
    double learning_rate = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::uint64_t step = 0;

    std::vector<std::pair<std::string, std::vector<double>>> first_moment;
    std::vector<std::pair<std::string, std::vector<double>>> second_moment;
};

// Applies one update over every trainable block. Blocks without a tape
// entry are skipped (frozen). Throws NumericError on NaN/Inf gradients
// before touching any parameter.
void optimizer_step(OptimizerState& state, ParameterSet& params, const GradientTape& grads);

}  // namespace aqa
