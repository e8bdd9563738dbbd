#pragma once

#include <stdexcept>
#include <string>

namespace eakd {

// Exit codes used by the CLI. Library code throws; the CLI maps to codes.
enum ExitCode : int {
    exit_ok = 0,
    exit_failure = 1,
    exit_config = 2,
    exit_io = 3,
    exit_divergence = 4,
};

// Bad hyperparameters, bad flag values, inconsistent model/data settings.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Unreadable/unwritable paths.
struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed file contents (IDX, checkpoint, CSV). Messages carry the byte
// offset or record that failed.
struct FormatError : IoError {
    explicit FormatError(const std::string& msg) : IoError(msg) {}
};

// Shape mismatches between tensors. Messages name both shapes.
struct DimensionError : std::invalid_argument {
    explicit DimensionError(const std::string& msg) : std::invalid_argument(msg) {}
};

// API misuse: non-scalar loss, missing gradient, weight above the entropy
// bound, non-finite inputs.
struct ContractError : std::logic_error {
    explicit ContractError(const std::string& msg) : std::logic_error(msg) {}
};

// Training produced a non-finite loss.
struct DivergenceError : std::runtime_error {
    explicit DivergenceError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace eakd
