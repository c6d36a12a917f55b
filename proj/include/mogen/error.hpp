#pragma once

#include <stdexcept>
#include <string>

namespace mogen {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or insufficient input data (parse failures, empty datasets).
class DataError : public Error {
public:
    using Error::Error;
};

/// A numerical procedure could not produce a valid result.
class NumericError : public Error {
public:
    using Error::Error;
};

/// Caller passed an argument outside the operation's domain.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// The requested measure is not defined for the given model family.
class UnsupportedMeasure : public Error {
public:
    using Error::Error;
};

} // namespace mogen
