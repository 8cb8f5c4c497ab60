#pragma once

#include <stdexcept>
#include <string>

namespace leser {

/// Base class for every error raised by the library. Messages are single
/// line so the CLI can forward them verbatim.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Malformed input data (corpus, query, run, index or embedding files).
class FormatError : public Error {
  public:
    using Error::Error;
};

/// A caller violated an operation precondition.
class InvalidArgument : public Error {
  public:
    using Error::Error;
};

}  // namespace leser
