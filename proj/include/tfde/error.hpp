#pragma once

#include <limits>
#include <stdexcept>
#include <string>

namespace tfde {

enum class ErrorKind {
  InvalidParameter,
  InvalidInput,
  InvalidModel,
  InvalidContour,
  AccuracyFailure,
  ConditioningFailure,
  SingularMatrix,
  IndefiniteForm,
  UnsupportedSize,
  DimensionMismatch,
  StabilityViolation,
  ConfigError,
  IoFailure,
};

const char* to_string(ErrorKind kind);

// detail carries the achieved tolerance, worst entry index or node index
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message,
        double detail = std::numeric_limits<double>::quiet_NaN());

  ErrorKind kind() const noexcept { return kind_; }
  double detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  double detail_;
};

}  // namespace tfde
