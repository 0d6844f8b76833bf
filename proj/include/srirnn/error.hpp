#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace srirnn {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Inconsistent dimensions between weights, states, taps or signals.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Bad user-supplied value (ratio, order, option).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// Malformed file content. `offset` is a byte offset for binary formats, or
// npos when the location is a key rather than a position.
class FormatError : public Error {
 public:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  explicit FormatError(const std::string& what, std::size_t offset = npos)
      : Error(what), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

// A non-finite value appeared while running a recurrence. `index` is the
// sample (time step) at which it was first observed.
class NumericError : public Error {
 public:
  NumericError(const std::string& what, std::size_t index)
      : Error(what), index_(index) {}

  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace srirnn
