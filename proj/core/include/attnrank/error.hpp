#pragma once

#include <stdexcept>
#include <string>

namespace attnrank {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or unreadable input (files, datasets, ranking files).
class InputError : public Error {
 public:
  using Error::Error;
};

// Operand shapes disagree (feature counts, parameter vectors, batch sizes).
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Parameter outside its documented domain.
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Numerical failure during model fitting.
class TrainingError : public Error {
 public:
  using Error::Error;
};

}  // namespace attnrank
