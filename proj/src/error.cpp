#include "dsi/error.hpp"

namespace dsi {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kInvalidRange: return "invalid-range";
    case ErrorCode::kDimensionMismatch: return "dimension-mismatch";
    case ErrorCode::kZeroNormVector: return "zero-norm-vector";
    case ErrorCode::kDegenerateVector: return "degenerate-vector";
    case ErrorCode::kEmptyInput: return "empty-input";
    case ErrorCode::kTooFewSentences: return "too-few-sentences";
    case ErrorCode::kMissingLayer: return "missing-layer";
    case ErrorCode::kLayerNotSupported: return "layer-not-supported";
    case ErrorCode::kMissingEmbedding: return "missing-embedding";
    case ErrorCode::kProviderUnavailable: return "provider-unavailable";
    case ErrorCode::kDuplicateId: return "duplicate-id";
    case ErrorCode::kParseError: return "parse-error";
    case ErrorCode::kMissingColumn: return "missing-column";
    case ErrorCode::kUnmappedSubject: return "unmapped-subject";
    case ErrorCode::kIoError: return "io-error";
    case ErrorCode::kValidation: return "validation-error";
    case ErrorCode::kTooFewGroups: return "too-few-groups";
    case ErrorCode::kEmptyGroup: return "empty-group";
    case ErrorCode::kRankDeficient: return "rank-deficient";
    case ErrorCode::kInsufficientObservations: return "insufficient-observations";
    case ErrorCode::kDegenerateSample: return "degenerate-sample";
    case ErrorCode::kNegativeCount: return "negative-count";
    case ErrorCode::kCorruptCheckpoint: return "corrupt-checkpoint";
  }
  return "unknown-error";
}

}  // namespace dsi
