#pragma once

#include <stdexcept>
#include <string>

namespace nplace {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on the inputs was violated.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// The requested decay rate cannot be reached with a positive delay.
class UnreachableRate : public Error {
public:
    using Error::Error;
};

/// Root counting/localisation could not complete.
class SolverError : public Error {
public:
    using Error::Error;
};

/// Decay-rate fitting had too little usable signal.
class FitError : public Error {
public:
    using Error::Error;
};

}  // namespace nplace
