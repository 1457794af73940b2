#pragma once

#include <stdexcept>
#include <string>

namespace rcsf {

// Shape disagreement between operands (matrix/vector/tensor dims).
struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Argument outside its mathematical domain (|sin| > 1, rho outside [0,1], ...).
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

// API called in an order its contract forbids (backward without forward, ...).
struct StateError : std::logic_error {
    using std::logic_error::logic_error;
};

// Feedback state machine violation (RATIO frame before any FULL frame, ...).
struct ProtocolError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed serialized bytes (frame, dataset, or model file).
struct DecodeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad or inconsistent user configuration.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// File-system failure; message carries the offending path.
struct IoError : std::runtime_error {
    IoError(const std::string& path, const std::string& what)
        : std::runtime_error(what + " [" + path + "]"), path(path) {}
    std::string path;
};

// Training diverged (non-finite loss); epoch records where.
struct TrainingError : std::runtime_error {
    TrainingError(size_t epoch, const std::string& what)
        : std::runtime_error(what + " (epoch " + std::to_string(epoch) + ")"),
          epoch(epoch) {}
    size_t epoch;
};

// Golden-vector or conformance check mismatch.
struct VerificationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace rcsf
