#include "tfde/error.hpp"

namespace tfde {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidParameter: return "invalid-parameter";
    case ErrorKind::InvalidInput: return "invalid-input";
    case ErrorKind::InvalidModel: return "invalid-model";
    case ErrorKind::InvalidContour: return "invalid-contour";
    case ErrorKind::AccuracyFailure: return "accuracy-failure";
    case ErrorKind::ConditioningFailure: return "conditioning-failure";
    case ErrorKind::SingularMatrix: return "singular-matrix";
    case ErrorKind::IndefiniteForm: return "indefinite-form";
    case ErrorKind::UnsupportedSize: return "unsupported-size";
    case ErrorKind::DimensionMismatch: return "dimension-mismatch";
    case ErrorKind::StabilityViolation: return "stability-violation";
    case ErrorKind::ConfigError: return "config-error";
    case ErrorKind::IoFailure: return "io-failure";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& message, double detail)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message),
      kind_(kind),
      detail_(detail) {}

}  // namespace tfde
