/* errors.hpp -- exception types shared across the library. */

#pragma once

#include <stdexcept>
#include <string>

namespace apfa {

/// Problems with input data: malformed CSV, rows that cannot be routed,
/// covariate mishaps. The CLI maps these to exit code 2.
struct DataError : std::runtime_error {
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// Problems with a model or a model-level operation: invalid graphs where
/// validity is required, size guards, unmet preconditions. Exit code 3.
struct ModelError : std::runtime_error {
    explicit ModelError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace apfa
