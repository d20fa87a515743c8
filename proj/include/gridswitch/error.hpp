#pragma once

#include <stdexcept>
#include <string>

namespace gridswitch {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed case-file text. The message names the matrix, row and column.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Structurally inconsistent case data (duplicate ids, dangling references).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Operation requires a connected network but the masked topology is split.
class DisconnectedNetworkError : public Error {
public:
    using Error::Error;
};

/// A sensitivity denominator vanished: the element is a bridge of the DC network.
class IslandingError : public Error {
public:
    using Error::Error;
};

}  // namespace gridswitch
