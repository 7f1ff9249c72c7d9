#ifndef BLOCKINFER_ERRORS_HPP
#define BLOCKINFER_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace blockinfer {

// Bad caller-supplied values (ids out of range, infeasible parameters).
class ArgumentError : public std::invalid_argument {
public:
    explicit ArgumentError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Structural failures during decomposition (disconnected input, etc).
class DecompositionError : public std::runtime_error {
public:
    explicit DecompositionError(const std::string& msg) : std::runtime_error(msg) {}
};

// State spaces or tables exceeding the configured caps.
class CapacityError : public std::runtime_error {
public:
    explicit CapacityError(const std::string& msg) : std::runtime_error(msg) {}
};

// Random generation gave up (retry budget exhausted).
class GenerationError : public std::runtime_error {
public:
    explicit GenerationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Non-finite values inside an inference engine.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace blockinfer

#endif
