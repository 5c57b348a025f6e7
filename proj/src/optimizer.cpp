#include "aqa/optimizer.hpp"

#include <cmath>

#include "aqa/errors.hpp"

namespace aqa {

OptimizerKind optimizer_from_string(std::string_view s) {
    if (s == "sgd") return OptimizerKind::Sgd;
    if (s == "adam") return OptimizerKind::Adam;
    throw ConfigError("unknown optimizer: " + std::string(s));
}

namespace {

std::vector<double>& moment_for(
    std::vector<std::pair<std::string, std::vector<double>>>& moments,
    const std::string& name, std::size_t size) {
    for (auto& [n, m] : moments)
        if (n == name) return m;
    moments.emplace_back(name, std::vector<double>(size, 0.0));
    return moments.back().second;
}

}  // namespace

void optimizer_step(OptimizerState& state, ParameterSet& params, const GradientTape& grads) {
    // validate before mutating anything
    for (const auto& [name, g] : grads.entries()) {
        const ParameterBlock& block = params.at(name);
        if (g.size() != block.values.size())
            throw ShapeError("optimizer_step: gradient for '" + name +
                             "' does not match block shape");
        for (double v : g)
            if (!std::isfinite(v))
                throw NumericError("optimizer_step aborted: non-finite gradient in block '" +
                                   name + "' at step " + std::to_string(state.step + 1));
    }

    state.step += 1;
    for (const auto& [name, g] : grads.entries()) {
        ParameterBlock& block = params.at(name);
        switch (state.kind) {
            case OptimizerKind::Sgd:
                for (std::size_t k = 0; k < g.size(); ++k)
                    block.values[k] -= state.learning_rate * g[k];
                break;
            case OptimizerKind::Adam: {
                auto& m = moment_for(state.first_moment, name, g.size());
                auto& v = moment_for(state.second_moment, name, g.size());
                double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
                double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
                for (std::size_t k = 0; k < g.size(); ++k) {
                    m[k] = state.beta1 * m[k] + (1.0 - state.beta1) * g[k];
                    v[k] = state.beta2 * v[k] + (1.0 - state.beta2) * g[k] * g[k];
                    double m_hat = m[k] / bc1;
                    double v_hat = v[k] / bc2;
                    block.values[k] -=
                        state.learning_rate * m_hat / (std::sqrt(v_hat) + state.epsilon);
                }
                break;
            }
        }
    }
}

}  // namespace aqa
