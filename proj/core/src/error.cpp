#include "layersolve/error.hpp"

#include <sstream>

namespace layersolve {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::SignViolation: return "SignViolation";
    case ErrorCode::FloorViolation: return "FloorViolation";
    case ErrorCode::CompatibilityViolation: return "CompatibilityViolation";
    case ErrorCode::EvaluationFailure: return "EvaluationFailure";
    case ErrorCode::UnsupportedRegime: return "UnsupportedRegime";
    case ErrorCode::LayersOverlap: return "LayersOverlap";
    case ErrorCode::NonMonotone: return "NonMonotone";
    case ErrorCode::ZeroPivot: return "ZeroPivot";
    case ErrorCode::MMatrixViolation: return "MMatrixViolation";
    case ErrorCode::ResidualTooLarge: return "ResidualTooLarge";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::MeshMismatch: return "MeshMismatch";
    case ErrorCode::ManufacturedMismatch: return "ManufacturedMismatch";
    case ErrorCode::UnknownExample: return "UnknownExample";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

namespace {

std::string describe(ErrorCode code, const std::string& message,
                     const ErrorContext& ctx) {
  std::ostringstream os;
  os << to_string(code) << ": " << message;
  if (ctx.n) os << " [N=" << *ctx.n << "]";
  if (ctx.m) os << " [M=" << *ctx.m << "]";
  if (ctx.step) os << " [j=" << *ctx.step << "]";
  if (ctx.row) os << " [row=" << *ctx.row << "]";
  return os.str();
}

}  // namespace

Error::Error(ErrorCode code, const std::string& message, ErrorContext context)
    : std::runtime_error(describe(code, message, context)),
      code_(code),
      message_(message),
      context_(context) {}

Error Error::with_context(const ErrorContext& outer) const {
  ErrorContext merged = context_;
  if (!merged.n) merged.n = outer.n;
  if (!merged.m) merged.m = outer.m;
  if (!merged.step) merged.step = outer.step;
  if (!merged.row) merged.row = outer.row;
  return Error(code_, message_, merged);
}

std::string Error::machine_line() const {
  std::ostringstream os;
  os << "error code=" << to_string(code_);
  if (context_.n) os << " N=" << *context_.n;
  if (context_.m) os << " M=" << *context_.m;
  if (context_.step) os << " j=" << *context_.step;
  if (context_.row) os << " row=" << *context_.row;
  std::string msg = message_;
  for (char& ch : msg) {
    if (ch == '\n' || ch == '"') ch = '\'';
  }
  os << " message=\"" << msg << "\"";
  return os.str();
}

}  // namespace layersolve
