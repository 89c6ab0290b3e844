#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace anssim {

enum class ErrorCode {
  InvalidArgument,
  MissingSpan,
  ContextMismatch,
  UnsupportedLanguage,
  EmptyReferences,
  ZeroVector,
  DimensionMismatch,
  LayerOutOfRange,
  EmptyCorpus,
  UnknownModel,
  BackendError,
  BackendUnreachable,
  UnknownPairId,
  MissingTieBreaker,
  LengthMismatch,
  MissingScores,
  MissingLabels,
  MalformedInput,
  ConfigError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so that
/// callers (the CLI in particular) can map it onto an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace anssim
