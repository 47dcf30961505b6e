#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace freqsketch {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A requested integral diverges (e.g. the total mass of a moment density).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A signed coefficient function whose Laplace^c transform is not positive.
class IllPosedTransform : public Error {
 public:
  using Error::Error;
};

class UnsupportedStatistic : public Error {
 public:
  using Error::Error;
};

class OverflowError : public Error {
 public:
  using Error::Error;
};

/// Malformed text input or a malformed/truncated binary sketch.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what, std::size_t line = 0)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

  [[nodiscard]] std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Two sketches that cannot be merged; `field()` names the first mismatch.
class IncompatibleSketch : public Error {
 public:
  explicit IncompatibleSketch(std::string field)
      : Error("incompatible sketches: " + field + " differs"), field_(std::move(field)) {}

  [[nodiscard]] const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace freqsketch
