#pragma once

#include <stdexcept>
#include <string>

namespace surco {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument, shape mismatch or malformed configuration.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// The feasible region is empty (or could not be populated by a generator).
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

/// A size guard on an exhaustive routine was exceeded.
class GuardError : public Error {
 public:
  using Error::Error;
};

/// Objective evaluated where it is undefined (zero path variance).
class DegenerateError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace surco
