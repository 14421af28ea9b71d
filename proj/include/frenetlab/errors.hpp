#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace frenetlab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A function produced a non-finite value, or an analytic supplier disagrees
/// with its finite-difference estimate.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

/// An argument lies outside the range an operation is defined on.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Base for every "this quantity is undefined here" failure. Carries the grid
/// node index when the failure happened while sampling a grid.
class DegenerateError : public Error {
 public:
  explicit DegenerateError(const std::string& what,
                           std::optional<std::size_t> node = std::nullopt)
      : Error(node ? what + " (node " + std::to_string(*node) + ")" : what),
        node_(node) {}

  [[nodiscard]] std::optional<std::size_t> node() const noexcept {
    return node_;
  }

 private:
  std::optional<std::size_t> node_;
};

/// Curvature at or below the degeneracy threshold: N and B are undefined.
class DegenerateFrameError : public DegenerateError {
 public:
  using DegenerateError::DegenerateError;
};

/// The curve stops (zero speed).
class DegenerateSpeedError : public DegenerateError {
 public:
  using DegenerateError::DegenerateError;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " at position " + std::to_string(position)),
        position_(position) {}

  [[nodiscard]] std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

}  // namespace frenetlab
