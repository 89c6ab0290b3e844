#include "anssim/error.hpp"

namespace anssim {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::MissingSpan: return "MissingSpan";
    case ErrorCode::ContextMismatch: return "ContextMismatch";
    case ErrorCode::UnsupportedLanguage: return "UnsupportedLanguage";
    case ErrorCode::EmptyReferences: return "EmptyReferences";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::LayerOutOfRange: return "LayerOutOfRange";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::UnknownModel: return "UnknownModel";
    case ErrorCode::BackendError: return "BackendError";
    case ErrorCode::BackendUnreachable: return "BackendUnreachable";
    case ErrorCode::UnknownPairId: return "UnknownPairId";
    case ErrorCode::MissingTieBreaker: return "MissingTieBreaker";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::MissingScores: return "MissingScores";
    case ErrorCode::MissingLabels: return "MissingLabels";
    case ErrorCode::MalformedInput: return "MalformedInput";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace anssim
