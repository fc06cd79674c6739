#pragma once

#include <stdexcept>
#include <string>

namespace liectrl {

enum class ErrorCode {
  IndexOutOfRange,
  DimensionMismatch,
  LogDomainError,
  SeriesDivergence,
  RepresentationDeficient,
  ConvergenceFailure,
  ConventionAmbiguity,
  StepTooLarge,
  BackendMismatch,
  NonAlignedShift,
  ClusterSplitFailure,
  FDConditioning,
  ChartDomainError,
  Uncoverable,
  StateEscape,
  ParseError,
  ValidationError,
};

const char* to_string(ErrorCode code);

/// Exception carrying a machine-readable code alongside the message.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& msg)
      : std::runtime_error(std::string(to_string(code)) + ": " + msg), code_(code) {}

  ErrorCode code() const { return code_; }

private:
  ErrorCode code_;
};

}  // namespace liectrl
