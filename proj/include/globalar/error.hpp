#pragma once

#include <stdexcept>
#include <string>

namespace globalar {

/// Base of every exception raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text (CSV rows, numbers, flags).
class ParseError : public Error {
public:
  ParseError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

/// Well-formed input whose structure violates a precondition (index gaps,
/// duplicate ids, series too short for an operation).
class StructuralError : public Error {
public:
  using Error::Error;
};

/// Too few observations for the requested fit.
class InsufficientDataError : public StructuralError {
public:
  using StructuralError::StructuralError;
};

/// Argument outside the domain of a numeric operation.
class DomainError : public Error {
public:
  using Error::Error;
};

/// A scale or metric denominator that evaluates to zero.
class DegenerateScaleError : public Error {
public:
  using Error::Error;
};

/// Non-finite value produced while forecasting recursively.
class InstabilityError : public Error {
public:
  InstabilityError(const std::string& series_id, std::size_t step)
      : Error("non-finite forecast for series '" + series_id + "' at step " +
              std::to_string(step)),
        step_(step) {}

  std::size_t step() const noexcept { return step_; }

private:
  std::size_t step_;
};

/// Network training produced a non-finite loss.
class TrainingError : public Error {
public:
  explicit TrainingError(std::size_t epoch)
      : Error("training diverged (non-finite loss) at epoch " + std::to_string(epoch)),
        epoch_(epoch) {}

  std::size_t epoch() const noexcept { return epoch_; }

private:
  std::size_t epoch_;
};

}  // namespace globalar
