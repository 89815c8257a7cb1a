#include "wsids/error.hpp"

namespace wsids {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::MalformedXml: return "MalformedXml";
    case ErrorKind::LimitExceeded: return "LimitExceeded";
    case ErrorKind::NotSoap: return "NotSoap";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::EmptyForest: return "EmptyForest";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::InvalidConfidence: return "InvalidConfidence";
    case ErrorKind::SchemaViolation: return "SchemaViolation";
    case ErrorKind::InvariantViolation: return "InvariantViolation";
    case ErrorKind::UnknownCategory: return "UnknownCategory";
    case ErrorKind::UnsupportedKind: return "UnsupportedKind";
    case ErrorKind::UndefinedMetric: return "UndefinedMetric";
    case ErrorKind::ModelNotLoaded: return "ModelNotLoaded";
    case ErrorKind::IoFailure: return "IoFailure";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::PipelineFailure: return "PipelineFailure";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind), message_(message) {}

}  // namespace wsids
