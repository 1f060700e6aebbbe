#pragma once

#include <stdexcept>
#include <string>

namespace tcid {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A value violates a structural invariant (cyclic graph, unnormalized row, ...).
class InvariantError : public Error {
public:
    using Error::Error;
};

/// An operation was called outside its precondition (unknown node, overlapping sets, ...).
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// Malformed serialized input.
class FormatError : public Error {
public:
    using Error::Error;
};

/// Quadrature or sampling failed to meet its tolerance.
class NumericError : public Error {
public:
    using Error::Error;
};

}  // namespace tcid
