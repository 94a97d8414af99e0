#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dsi {

enum class ErrorCode {
  kInvalidArgument,
  kInvalidRange,
  kDimensionMismatch,
  kZeroNormVector,
  kDegenerateVector,
  kEmptyInput,
  kTooFewSentences,
  kMissingLayer,
  kLayerNotSupported,
  kMissingEmbedding,
  kProviderUnavailable,
  kDuplicateId,
  kParseError,
  kMissingColumn,
  kUnmappedSubject,
  kIoError,
  kValidation,
  kTooFewGroups,
  kEmptyGroup,
  kRankDeficient,
  kInsufficientObservations,
  kDegenerateSample,
  kNegativeCount,
  kCorruptCheckpoint,
};

std::string_view to_string(ErrorCode code);

// Carries a machine-checkable code next to the human message. Parse and
// I/O errors put their location (file, line) in the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code),
        message_(message) {}

  ErrorCode code() const noexcept { return code_; }
  /// The message without the code prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
};

}  // namespace dsi
