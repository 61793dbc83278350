#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace layersolve {

enum class ErrorCode {
  InvalidArgument,
  SignViolation,
  FloorViolation,
  CompatibilityViolation,
  EvaluationFailure,
  UnsupportedRegime,
  LayersOverlap,
  NonMonotone,
  ZeroPivot,
  MMatrixViolation,
  ResidualTooLarge,
  NonFiniteValue,
  MeshMismatch,
  ManufacturedMismatch,
  UnknownExample,
  ConfigError,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Where in a run an error surfaced. Fields are filled in as the error
/// propagates outward (march knows the step, the study knows N and M).
struct ErrorContext {
  std::optional<std::size_t> n;
  std::optional<std::size_t> m;
  std::optional<std::size_t> step;
  std::optional<std::size_t> row;
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, ErrorContext context = {});

  ErrorCode code() const noexcept { return code_; }
  const ErrorContext& context() const noexcept { return context_; }
  const std::string& message() const noexcept { return message_; }

  /// Copy of this error with any unset context fields taken from `outer`.
  Error with_context(const ErrorContext& outer) const;

  /// Single-line `key=value` rendering, stable for scripting.
  std::string machine_line() const;

 private:
  ErrorCode code_;
  std::string message_;
  ErrorContext context_;
};

}  // namespace layersolve
