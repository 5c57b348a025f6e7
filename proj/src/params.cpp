#include "aqa/params.hpp"

#include <cmath>

#include "aqa/errors.hpp"

namespace aqa {

ParameterBlock& ParameterSet::add(std::string name, std::vector<std::size_t> shape) {
    ParameterBlock block;
    block.name = std::move(name);
    block.shape = std::move(shape);
    block.values.assign(block.size(), 0.0);
    return add(std::move(block));
}

ParameterBlock& ParameterSet::add(ParameterBlock block) {
    if (has(block.name))
        throw ConfigError("duplicate parameter block name: " + block.name);
    if (block.values.size() != block.size())
        throw ShapeError("block '" + block.name + "': storage size " +
                         std::to_string(block.values.size()) +
                         " does not match shape product " + std::to_string(block.size()));
    blocks_.push_back(std::move(block));
    return blocks_.back();
}

bool ParameterSet::has(std::string_view name) const {
    for (const auto& b : blocks_)
        if (b.name == name) return true;
    return false;
}

ParameterBlock& ParameterSet::at(std::string_view name) {
    for (auto& b : blocks_)
        if (b.name == name) return b;
    throw ConfigError("unknown parameter block: " + std::string(name));
}

const ParameterBlock& ParameterSet::at(std::string_view name) const {
    for (const auto& b : blocks_)
        if (b.name == name) return b;
    throw ConfigError("unknown parameter block: " + std::string(name));
}

std::size_t ParameterSet::total_values() const {
    std::size_t n = 0;
    for (const auto& b : blocks_) n += b.values.size();
    return n;
}

void ParameterSet::validate() const {
    for (const auto& b : blocks_) {
        if (b.values.size() != b.size())
            throw ShapeError("block '" + b.name + "' storage/shape mismatch");
        for (double v : b.values)
            if (!std::isfinite(v))
                throw NumericError("block '" + b.name + "' contains a non-finite value");
    }
}

GradientTape::GradientTape(const ParameterSet& params) {
    grads_.reserve(params.blocks().size());
    for (const auto& b : params.blocks())
        grads_.emplace_back(b.name, std::vector<double>(b.values.size(), 0.0));
}

std::vector<double>& GradientTape::grad(std::string_view name) {
    for (auto& [n, g] : grads_)
        if (n == name) return g;
    throw ConfigError("gradient tape has no block: " + std::string(name));
}

const std::vector<double>& GradientTape::grad(std::string_view name) const {
    for (const auto& [n, g] : grads_)
        if (n == name) return g;
    throw ConfigError("gradient tape has no block: " + std::string(name));
}

void GradientTape::zero() {
    for (auto& [n, g] : grads_) std::fill(g.begin(), g.end(), 0.0);
}

void GradientTape::scale(double factor) {
    for (auto& [n, g] : grads_)
        for (double& v : g) v *= factor;
}

}  // namespace aqa
