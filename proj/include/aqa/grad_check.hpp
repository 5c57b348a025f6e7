#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "aqa/params.hpp"

namespace aqa {

struct GradCheckOptions {
    double epsilon = 1e-5;
    std::size_t coords_per_block = 200;  // random subsample; whole block if smaller
    std::uint64_t seed = 0;
    // Blocks to check; empty means every block in the set.
    std::vector<std::string> check_blocks;
    // When the two one-sided slopes around a coordinate disagree, the loss
    // is locally non-smooth there (a relu kink under the probe) and the
    // central estimate is meaningless; such coordinates are skipped and
    // counted instead of failing the check.
    double smoothness_tolerance = 1e-3;
};

struct GradCheckReport {
    double max_relative_error = 0.0;
    std::string worst_block;
    std::size_t worst_index = 0;
    std::size_t coords_checked = 0;
    std::size_t coords_skipped_nonsmooth = 0;
};

// Central finite differences against an analytic gradient. `loss` must
// evaluate the scalar objective from the current parameter values;
// `analytic` holds d loss / d parameter for every checked block.
// Relative error per coordinate is |a - n| / max(|a| + |n|, 1e-3).
GradCheckReport gradient_check(const std::function<double()>& loss, ParameterSet& params,
                               const GradientTape& analytic, const GradCheckOptions& opts);

}  // namespace aqa
