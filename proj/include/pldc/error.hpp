#pragma once

#include <stdexcept>
#include <string>

namespace pldc {

// Base of every error the library raises on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shapes or dimensions that do not compose.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent input data (CSV cells, duplicate rows, labels).
class DataError : public Error {
 public:
  using Error::Error;
};

// An iterative solver produced non-finite values.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

// Representation would exceed the configured plane budget.
class CapacityError : public Error {
 public:
  using Error::Error;
};

// The interior-point oracle failed on a program that should be solvable.
class SolverError : public Error {
 public:
  using Error::Error;
};

}  // namespace pldc
