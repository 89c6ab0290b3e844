#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace anssim {

/// Per-token vectors for one text at one model layer, stored row-major.
class TokenEmbeddingMatrix {
 public:
  TokenEmbeddingMatrix() = default;
  /// Throws DimensionMismatch unless values.size() == tokens.size() * dim.
  TokenEmbeddingMatrix(std::vector<std::string> tokens, std::vector<double> values, std::size_t dim,
                       int layer);

  const std::vector<std::string>& tokens() const noexcept { return tokens_; }
  std::size_t rows() const noexcept { return tokens_.size(); }
  std::size_t dim() const noexcept { return dim_; }
  int layer() const noexcept { return layer_; }
  bool normalized() const noexcept { return normalized_; }
  std::span<const double> row(std::size_t i) const;

  /// Copy with every row scaled to unit length. Throws ZeroVector for an
  /// all-zero row.
  TokenEmbeddingMatrix row_normalized() const;

 private:
  std::vector<std::string> tokens_;
  std::vector<double> values_;
  std::size_t dim_ = 0;
  int layer_ = 0;
  bool normalized_ = false;
};

struct SentenceEmbedding {
  std::vector<double> vector;
  bool normalized = false;
};

}  // namespace anssim
