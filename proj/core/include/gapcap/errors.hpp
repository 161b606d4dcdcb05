#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gapcap {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Raised by the LU factorization when a pivot falls below 1e-13 of its row scale.
class SingularMatrixError : public Error {
 public:
  SingularMatrixError(std::size_t pivot_index, double pivot, double row_scale)
      : Error("matrix is singular to working precision at pivot " +
              std::to_string(pivot_index) + " (|pivot| = " + std::to_string(pivot) +
              ", row scale = " + std::to_string(row_scale) + ")"),
        pivot_index_(pivot_index) {}

  std::size_t pivot_index() const noexcept { return pivot_index_; }

 private:
  std::size_t pivot_index_;
};

class InvalidTransformError : public Error {
 public:
  using Error::Error;
};

class UnsupportedLawError : public Error {
 public:
  using Error::Error;
};

class UnsupportedCombinationError : public Error {
 public:
  using Error::Error;
};

class ReducibleChainError : public Error {
 public:
  using Error::Error;
};

class SimulationError : public Error {
 public:
  using Error::Error;
};

}  // namespace gapcap
