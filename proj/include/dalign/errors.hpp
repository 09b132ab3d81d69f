#pragma once

#include <stdexcept>
#include <string>

namespace dalign {

enum class ErrorCode {
  invalid_input,
  numerical_failure,
  empty_complement,
  unsupported_order,
  dimension_mismatch,
  invalid_basis,
  shape_error,
  rank_mismatch,
  not_applicable,
  not_aligned,
  verification_failure,
  io_error,
};

constexpr const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_input: return "InvalidInput";
    case ErrorCode::numerical_failure: return "NumericalFailure";
    case ErrorCode::empty_complement: return "EmptyComplement";
    case ErrorCode::unsupported_order: return "UnsupportedOrder";
    case ErrorCode::dimension_mismatch: return "DimensionMismatch";
    case ErrorCode::invalid_basis: return "InvalidBasis";
    case ErrorCode::shape_error: return "ShapeError";
    case ErrorCode::rank_mismatch: return "RankMismatch";
    case ErrorCode::not_applicable: return "NotApplicable";
    case ErrorCode::not_aligned: return "NotAligned";
    case ErrorCode::verification_failure: return "VerificationFailure";
    case ErrorCode::io_error: return "IoError";
  }
  return "Unknown";
}

/// Every failure in the library is reported as an Error carrying a code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace dalign
