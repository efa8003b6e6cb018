#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rppg {

enum class ErrorCode {
  kInvalidArgument,
  kInvalidConfig,
  kInputMissing,
  kParseError,
  kLengthMismatch,
  kDegenerateCell,
  kEmptyCell,
  kSignalTooShort,
  kEmptySpectrogram,
  kNoOverlap,
  kEmptyPairing,
};

/// Stable kebab-case name used in machine-readable error output.
std::string_view error_class(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace rppg
