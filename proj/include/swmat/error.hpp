#pragma once

#include <stdexcept>
#include <string>

namespace swmat {

/// Base for all failures raised by the toolkit.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed command line.
class UsageError : public Error {
public:
  using Error::Error;
};

/// Unreadable or syntactically invalid input (files, manifests, JSON).
class InputError : public Error {
public:
  using Error::Error;
};

/// Input that parses but breaks a model invariant, or a degenerate
/// computation request (e.g. a correlation over a constant sample).
class InvariantError : public Error {
public:
  using Error::Error;
};

} // namespace swmat
