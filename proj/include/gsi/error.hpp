#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gsi {

enum class ErrorKind {
  InvalidArgument,
  EmptyDonorSet,
  EmptyTrainingSet,
  InfeasibleK,
  MissingControl,
  NumericalFailure,
  DivergenceDetected,
  DegenerateTruth,
  AllZeroDifferences,
  InfeasibleMask,
  ParseError,
  DuplicatePair,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Single exception type for the library; `kind()` carries the failure class
/// so callers (the evaluation harness, the CLI) can branch without parsing
/// messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace gsi
