#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mcalc {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

class ArityError : public Error {
 public:
  using Error::Error;
};

class ConflictingShape : public Error {
 public:
  using Error::Error;
};

class UnboundVariable : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class DivisionByZero : public DomainError {
 public:
  using DomainError::DomainError;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class CyclicDefinition : public Error {
 public:
  using Error::Error;
};

class UnknownFunction : public Error {
 public:
  UnknownFunction(const std::string& name, std::size_t position)
      : Error("unknown function '" + name + "' at position " + std::to_string(position)),
        position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// Parse failure. `position` is a 0-based byte offset into the source text.
class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& what, std::size_t position)
      : Error(what + " at position " + std::to_string(position)), position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

class Diverged : public Error {
 public:
  explicit Diverged(std::size_t epoch)
      : Error("training diverged at epoch " + std::to_string(epoch)), epoch_(epoch) {}
  std::size_t epoch() const { return epoch_; }

 private:
  std::size_t epoch_;
};

class CsvError : public Error {
 public:
  CsvError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace mcalc
