#include "aqa/grad_check.hpp"

#include <algorithm>
#include <cmath>

#include "aqa/errors.hpp"
#include "aqa/rng.hpp"

namespace aqa {

GradCheckReport gradient_check(const std::function<double()>& loss, ParameterSet& params,
                               const GradientTape& analytic, const GradCheckOptions& opts) {
    if (opts.epsilon <= 0) throw ConfigError("gradient_check: epsilon must be positive");

    Rng rng(opts.seed);
    GradCheckReport report;
    const double f0 = loss();

    for (auto& block : params.blocks()) {
        if (!opts.check_blocks.empty() &&
            std::find(opts.check_blocks.begin(), opts.check_blocks.end(), block.name) ==
                opts.check_blocks.end())
            continue;

        const std::vector<double>& g = analytic.grad(block.name);

        // sample without replacement when the block is large
        std::vector<std::size_t> coords;
        if (block.values.size() <= opts.coords_per_block) {
            coords.resize(block.values.size());
            for (std::size_t k = 0; k < coords.size(); ++k) coords[k] = k;
        } else {
            std::vector<std::size_t> all(block.values.size());
            for (std::size_t k = 0; k < all.size(); ++k) all[k] = k;
            rng.shuffle(all);
            coords.assign(all.begin(),
                          all.begin() + static_cast<std::ptrdiff_t>(opts.coords_per_block));
        }

        for (std::size_t k : coords) {
            double saved = block.values[k];
            block.values[k] = saved + opts.epsilon;
            double f_plus = loss();
            block.values[k] = saved - opts.epsilon;
            double f_minus = loss();
            block.values[k] = saved;

            double slope_plus = (f_plus - f0) / opts.epsilon;
            double slope_minus = (f0 - f_minus) / opts.epsilon;
            double slope_gap = std::abs(slope_plus - slope_minus);
            if (slope_gap > opts.smoothness_tolerance *
                                (std::abs(slope_plus) + std::abs(slope_minus) + 1.0)) {
                ++report.coords_skipped_nonsmooth;
                continue;
            }

            double numeric = (f_plus - f_minus) / (2.0 * opts.epsilon);
            double a = g[k];
            double rel = std::abs(a - numeric) / std::max(std::abs(a) + std::abs(numeric), 1e-3);
            ++report.coords_checked;
            if (rel > report.max_relative_error) {
                report.max_relative_error = rel;
                report.worst_block = block.name;
                report.worst_index = k;
            }
        }
    }
    return report;
}

}  // namespace aqa
