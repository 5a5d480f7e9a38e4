#pragma once

#include <stdexcept>
#include <string>

namespace sphrecon {

/// Base of every error raised by the library. The CLI maps each subclass to a
/// distinct exit code.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition of an operation was violated by the caller.
class ContractError : public Error {
public:
    using Error::Error;
};

/// Input satisfies the type invariants but is geometrically degenerate
/// (zero area, zero extent, nothing observed, ...).
class DegenerateInputError : public Error {
public:
    using Error::Error;
};

/// Every threshold of an evaluation sweep produced an empty isosurface.
class EmptyPredictionError : public DegenerateInputError {
public:
    using DegenerateInputError::DegenerateInputError;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// File exists but does not follow the expected layout (bad magic, bad header).
class FormatError : public IoError {
public:
    using IoError::IoError;
};

/// Header is well-formed but the payload disagrees with it.
class CorruptionError : public IoError {
public:
    using IoError::IoError;
};

namespace detail {
inline void require(bool cond, const std::string& what) {
    if (!cond) throw ContractError(what);
}
}  // namespace detail

}  // namespace sphrecon
