#pragma once

#include <stdexcept>
#include <string>

namespace mtnet {

// Thrown when matrix/vector dimensions do not conform. Messages name both shapes.
struct ShapeError : std::invalid_argument {
    explicit ShapeError(const std::string& what) : std::invalid_argument(what) {}
};

// Invalid scalar argument (rate out of range, odd batch size, bad ratios, ...).
struct ParameterError : std::invalid_argument {
    explicit ParameterError(const std::string& what) : std::invalid_argument(what) {}
};

// Raw data does not conform to its schema (unknown category, wrong column count, ...).
struct SchemaError : std::runtime_error {
    explicit SchemaError(const std::string& what) : std::runtime_error(what) {}
};

// Infeasible or malformed configuration (synthetic generator, experiment file, ...).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Sampling/stratification/augmentation preconditions violated (empty class, < 2 positives, ...).
struct DataError : std::runtime_error {
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Metric preconditions violated (single-class input, no positives, empty aggregation).
struct MetricError : std::runtime_error {
    explicit MetricError(const std::string& what) : std::runtime_error(what) {}
};

// Non-finite loss or gradients during training; message reports epoch/batch.
struct DivergenceError : std::runtime_error {
    explicit DivergenceError(const std::string& what) : std::runtime_error(what) {}
};

// File I/O and container format failures (truncated file, bad magic, version mismatch).
struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// Objective function returned a non-finite value during a gradient check.
struct EvaluationError : std::runtime_error {
    explicit EvaluationError(const std::string& what) : std::runtime_error(what) {}
};

// Forward trace does not match the parameters handed to backward.
struct ConsistencyError : std::runtime_error {
    explicit ConsistencyError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mtnet
