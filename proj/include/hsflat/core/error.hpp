#pragma once

#include <stdexcept>
#include <string>

namespace hsflat {

/// Base class for all library errors. The CLI maps the subclasses onto exit codes.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Invalid input: bad configuration, precondition violated by the caller.
class InvalidArgument : public Error {
public:
  using Error::Error;
};

/// A numerical procedure failed (solver divergence, pinching, instability).
class NumericError : public Error {
public:
  using Error::Error;
};

/// A verified property did not hold.
class AssertionFailure : public Error {
public:
  using Error::Error;
};

namespace detail {

inline void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidArgument(what);
}

} // namespace detail
} // namespace hsflat
