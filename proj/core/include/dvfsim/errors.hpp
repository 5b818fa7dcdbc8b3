#pragma once

#include <stdexcept>

namespace dvfsim {

/// Base class for all dvfsim errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument or configuration value is out of its documented domain.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// A structural invariant is broken (cycle in a graph, dangling edge,
/// overlapping schedule entries, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A file could not be parsed; the message names the offending line or field.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// A slack window or frequency LP has no feasible solution.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

/// Filesystem failure (open/read/write).
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace dvfsim
