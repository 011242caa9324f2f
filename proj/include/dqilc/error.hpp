#pragma once

#include <stdexcept>
#include <string>

namespace dqilc {

// Thrown when an algebraic invariant (unit norm, orthogonality, symmetry)
// does not hold for an input or an intermediate result.
class InvariantError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// Thrown for malformed arguments: dimension mismatch, out-of-range time, bad
// configuration values.
class ArgumentError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

class IoError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

} // namespace dqilc
