#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace aqa {

// Named, shaped, flat float64 storage. Values are row-major.
struct ParameterBlock {
    std::string name;
    std::vector<std::size_t> shape;
    std::vector<double> values;

    std::size_t size() const {
        std::size_t n = 1;
        for (std::size_t d : shape) n *= d;
        return n;
    }
};

// Ordered collection of uniquely named blocks. Order is part of the
// contract: checkpoints and gradient tapes follow it.
class ParameterSet {
public:
    ParameterBlock& add(std::string name, std::vector<std::size_t> shape);
    ParameterBlock& add(ParameterBlock block);

    bool has(std::string_view name) const;
    ParameterBlock& at(std::string_view name);
    const ParameterBlock& at(std::string_view name) const;

    std::span<ParameterBlock> blocks() { return blocks_; }
    std::span<const ParameterBlock> blocks() const { return blocks_; }

    std::size_t total_values() const;

    // All values finite; shapes consistent with storage.
    void validate() const;

private:
    std::vector<ParameterBlock> blocks_;
};

// Per-block gradient arrays, shape-aligned with a ParameterSet. Cleared
// between training steps.
class GradientTape {
public:
    GradientTape() = default;
    explicit GradientTape(const ParameterSet& params);

    std::vector<double>& grad(std::string_view name);
    const std::vector<double>& grad(std::string_view name) const;

    void zero();
    void scale(double factor);

    std::span<const std::pair<std::string, std::vector<double>>> entries() const {
        return grads_;
    }

private:
    std::vector<std::pair<std::string, std::vector<double>>> grads_;
};

}  // namespace aqa
