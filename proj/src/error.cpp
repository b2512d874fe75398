#include "sbridge/error.hpp"

namespace sbridge {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NegativeEntry: return "NegativeEntry";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::NonPositiveTemperature: return "NonPositiveTemperature";
    case ErrorCode::HorizonMismatch: return "HorizonMismatch";
    case ErrorCode::ZeroEntry: return "ZeroEntry";
    case ErrorCode::NonPositiveKernel: return "NonPositiveKernel";
    case ErrorCode::MaxIterationsExceeded: return "MaxIterationsExceeded";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::InfeasibleSupport: return "InfeasibleSupport";
    case ErrorCode::EnumerationBudgetExceeded: return "EnumerationBudgetExceeded";
    case ErrorCode::NoFeasiblePath: return "NoFeasiblePath";
    case ErrorCode::NotPrimitive: return "NotPrimitive";
    case ErrorCode::OracleScaleExceeded: return "OracleScaleExceeded";
    case ErrorCode::IrrationalMarginals: return "IrrationalMarginals";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

bool is_input_error(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::NegativeEntry:
    case ErrorCode::NotNormalized:
    case ErrorCode::IndexOutOfRange:
    case ErrorCode::NonPositiveTemperature:
    case ErrorCode::HorizonMismatch:
    case ErrorCode::IrrationalMarginals:
    case ErrorCode::ParseError:
      return true;
    default:
      return false;
  }
}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace sbridge
