#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bklab {

enum class ErrorCode {
  NonFiniteInput = 1,
  HorizonOverflow,
  DegenerateSpectrum,
  UnstableCoefficients,
  InvalidOrder,
  InvalidNoise,
  InsufficientHorizon,
  InvalidParams,
  EmptyGrid,
  InfiniteMoment,
  ParseError,
  ValidationError,
  IoError,
  InvalidArgument,
};

std::string_view error_code_name(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above; the
/// C API maps them one-to-one onto bk_status values.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

}  // namespace bklab
