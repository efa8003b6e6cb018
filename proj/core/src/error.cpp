#include "rppg/error.hpp"

namespace rppg {

std::string_view error_class(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kInvalidConfig: return "config-invalid";
    case ErrorCode::kInputMissing: return "input-missing";
    case ErrorCode::kParseError: return "parse-error";
    case ErrorCode::kLengthMismatch: return "length-mismatch";
    case ErrorCode::kDegenerateCell: return "degenerate-cell";
    case ErrorCode::kEmptyCell: return "empty-cell";
    case ErrorCode::kSignalTooShort: return "signal-too-short";
    case ErrorCode::kEmptySpectrogram: return "empty-spectrogram";
    case ErrorCode::kNoOverlap: return "no-overlap";
    case ErrorCode::kEmptyPairing: return "empty-pairing";
  }
  return "unknown";
}

}  // namespace rppg
