#include "bklab/error.hpp"

namespace bklab {

std::string_view error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NonFiniteInput: return "NonFiniteInput";
    case ErrorCode::HorizonOverflow: return "HorizonOverflow";
    case ErrorCode::DegenerateSpectrum: return "DegenerateSpectrum";
    case ErrorCode::UnstableCoefficients: return "UnstableCoefficients";
    case ErrorCode::InvalidOrder: return "InvalidOrder";
    case ErrorCode::InvalidNoise: return "InvalidNoise";
    case ErrorCode::InsufficientHorizon: return "InsufficientHorizon";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::EmptyGrid: return "EmptyGrid";
    case ErrorCode::InfiniteMoment: return "InfiniteMoment";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace bklab
