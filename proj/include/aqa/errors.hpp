#pragma once

#include <stdexcept>
#include <string>

namespace aqa {

// Error taxonomy. The CLI maps each class to a distinct exit code, so
// keep new failure kinds inside one of these.

struct ShapeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed input files (feature files, manifests, checkpoints).
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad configuration values or unknown modes.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Operation called in the wrong order (e.g. backward before forward).
struct StateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// NaN/Inf encountered where finite values are required.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Missing prerequisite artifact (checkpoint, manifest, expert).
struct MissingDependencyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace aqa
