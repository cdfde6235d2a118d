#pragma once

#include <stdexcept>
#include <string>

namespace sphsp {

/// Raised when a caller passes arguments outside an operation's domain
/// (bad shapes, out-of-range indices, malformed files).
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a computation produces non-finite values.
class NumericalFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline void require(bool condition, const std::string& message) {
    if (!condition) {
        throw InvalidInput(message);
    }
}

}  // namespace sphsp
