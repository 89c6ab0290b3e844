#include "anssim/model_backend.hpp"

#include <cmath>

#include "anssim/error.hpp"
#include "anssim/hash.hpp"

namespace anssim {

TokenEmbeddingMatrix::TokenEmbeddingMatrix(std::vector<std::string> tokens, std::vector<double> values,
                                           std::size_t dim, int layer)
    : tokens_(std::move(tokens)), values_(std::move(values)), dim_(dim), layer_(layer) {
  if (values_.size() != tokens_.size() * dim_) {
    throw Error(ErrorCode::DimensionMismatch,
                "embedding matrix has " + std::to_string(values_.size()) + " values for " +
                    std::to_string(tokens_.size()) + " tokens of dimension " + std::to_string(dim_));
  }
}

std::span<const double> TokenEmbeddingMatrix::row(std::size_t i) const {
  return std::span<const double>(values_).subspan(i * dim_, dim_);
}

TokenEmbeddingMatrix TokenEmbeddingMatrix::row_normalized() const {
  TokenEmbeddingMatrix out = *this;
  for (std::size_t i = 0; i < rows(); ++i) {
    double sq = 0.0;
    for (const double v : row(i)) sq += v * v;
    if (sq == 0.0) {
      throw Error(ErrorCode::ZeroVector, "embedding row for token '" + tokens_[i] + "' is all zero");
    }
    const double norm = std::sqrt(sq);
    for (std::size_t k = 0; k < dim_; ++k) out.values_[i * dim_ + k] /= norm;
  }
  out.normalized_ = true;
  return out;
}

std::string_view to_string(ModelKind kind) noexcept {
  switch (kind) {
    case ModelKind::TokenEncoder: return "token_encoder";
    case ModelKind::SentenceEncoder: return "sentence_encoder";
    case ModelKind::CrossEncoder: return "cross_encoder";
  }
  return "token_encoder";
}

std::optional<ModelKind> parse_model_kind(std::string_view name) {
  if (name == "token_encoder" || name == "TOKEN_ENCODER") return ModelKind::TokenEncoder;
  if (name == "sentence_encoder" || name == "SENTENCE_ENCODER") return ModelKind::SentenceEncoder;
  if (name == "cross_encoder" || name == "CROSS_ENCODER") return ModelKind::CrossEncoder;
  return std::nullopt;
}

std::string ModelSpec::snapshot_key() const {
  if (!snapshot.empty()) return alias + "@" + snapshot;
  const std::string identity = alias + '\x1f' + hub_id + '\x1f' + std::string(to_string(kind)) + '\x1f' +
                               std::to_string(num_layers) + '\x1f' + std::to_string(dim);
  return alias + "@" + hex64(fnv1a64(identity));
}

ModelSpec ModelBackend::model(const std::string& alias) {
  for (auto& spec : models()) {
    if (spec.alias == alias) return spec;
  }
  throw Error(ErrorCode::UnknownModel, "backend has no model '" + alias + "'");
}

std::unique_ptr<ModelBackend> make_backend(const std::string& url) {
  if (url == "synthetic" || url.rfind("synthetic://", 0) == 0) return std::make_unique<SyntheticBackend>();
  if (url.empty()) throw Error(ErrorCode::ConfigError, "no backend URL configured");
  return std::make_unique<HttpBackend>(url);
}

}  // namespace anssim
