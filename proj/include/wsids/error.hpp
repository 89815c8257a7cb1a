#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wsids {

enum class ErrorKind {
  MalformedXml,
  LimitExceeded,
  NotSoap,
  InvalidArgument,
  EmptyForest,
  BudgetExceeded,
  InvalidConfidence,
  SchemaViolation,
  InvariantViolation,
  UnknownCategory,
  UnsupportedKind,
  UndefinedMetric,
  ModelNotLoaded,
  IoFailure,
  ConfigError,
  PipelineFailure,
};

std::string_view to_string(ErrorKind kind) noexcept;

// Every failure raised by the library carries a kind so callers (the
// detector in particular) can map it to a verdict or an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }
  // Without the "Kind: " prefix that what() carries.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorKind kind_;
  std::string message_;
};

}  // namespace wsids
