#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kgedmd {

// Bad arguments: dimension mismatch, invalid bounds, inconsistent sizes.
struct InputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A coefficient field returned a non-finite value.
struct EvaluationError : std::runtime_error {
    EvaluationError(const std::string& what, std::size_t index)
        : std::runtime_error(what), point_index(index) {}
    std::size_t point_index;
};

}  // namespace kgedmd
