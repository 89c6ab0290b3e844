#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "anssim/embedding.hpp"

namespace anssim {

enum class ModelKind { TokenEncoder, SentenceEncoder, CrossEncoder };

std::string_view to_string(ModelKind kind) noexcept;
std::optional<ModelKind> parse_model_kind(std::string_view name);

struct ModelSpec {
  std::string alias;
  std::string hub_id;
  ModelKind kind = ModelKind::TokenEncoder;
  int num_layers = 0;
  int dim = 0;
  /// Opaque revision identifier reported by the server, if any.
  std::string snapshot;

  /// Stable identity of the loaded weights, used to key score caches.
  std::string snapshot_key() const;
};

/// Token embeddings of one text for every requested layer. Tokens are shared
/// across layers and exclude the model's special tokens.
struct TokenEmbeddingResult {
  std::vector<std::string> tokens;
  std::map<int, TokenEmbeddingMatrix> layers;
  bool truncated = false;
};

using TextPair = std::pair<std::string, std::string>;

/// Inference service interface. Implementations must be safe to call from
/// several threads at once; requests are independent of each other.
class ModelBackend {
 public:
  virtual ~ModelBackend() = default;

  virtual std::vector<ModelSpec> models() = 0;
  virtual std::vector<TokenEmbeddingResult> embed_tokens(std::span<const std::string> texts,
                                                         const std::string& model,
                                                         std::span<const int> layers) = 0;
  virtual std::vector<SentenceEmbedding> embed_sentence(std::span<const std::string> texts,
                                                        const std::string& model) = 0;
  /// Raw regression outputs, one per pair, before any clamping.
  virtual std::vector<double> cross_score(std::span<const TextPair> pairs, const std::string& model) = 0;

  /// Roster entry for `alias`. Throws UnknownModel.
  ModelSpec model(const std::string& alias);
};

struct HttpBackendOptions {
  std::chrono::milliseconds connect_timeout{2000};
  std::chrono::milliseconds read_timeout{120000};
};

/// Client for the inference sidecar's /v1 JSON protocol. Connection failures
/// raise BackendUnreachable; any other failure raises BackendError carrying
/// the endpoint and model in its message.
class HttpBackend : public ModelBackend {
 public:
  explicit HttpBackend(std::string base_url, HttpBackendOptions options = {});

  const std::string& base_url() const noexcept { return base_url_; }

  std::vector<ModelSpec> models() override;
  std::vector<TokenEmbeddingResult> embed_tokens(std::span<const std::string> texts,
                                                 const std::string& model,
                                                 std::span<const int> layers) override;
  std::vector<SentenceEmbedding> embed_sentence(std::span<const std::string> texts,
                                                const std::string& model) override;
  std::vector<double> cross_score(std::span<const TextPair> pairs, const std::string& model) override;

 private:
  std::string post(const std::string& path, const std::string& body, const std::string& model);

  std::string base_url_;
  HttpBackendOptions options_;
};

/// Offline deterministic backend. Tokens are lowercase alphanumeric runs;
/// each (token, layer) maps to a pseudo-random unit vector derived from a
/// stable hash. Sentence vectors are normalized token means at the last
/// layer and cross scores are clamped cosines of those. Useful for wiring
/// checks and tests; its scores carry no semantic meaning.
class SyntheticBackend : public ModelBackend {
 public:
  struct Options {
    int num_layers = 4;
    int dim = 32;
    std::vector<std::string> token_aliases{"bertscore-vanilla-en", "bertscore-vanilla-de",
                                           "bertscore-trained"};
    std::vector<std::string> sentence_aliases{"bi-encoder"};
    std::vector<std::string> cross_aliases{"sas-en", "sas-de"};
  };

  SyntheticBackend();
  explicit SyntheticBackend(Options options);

  std::vector<ModelSpec> models() override;
  std::vector<TokenEmbeddingResult> embed_tokens(std::span<const std::string> texts,
                                                 const std::string& model,
                                                 std::span<const int> layers) override;
  std::vector<SentenceEmbedding> embed_sentence(std::span<const std::string> texts,
                                                const std::string& model) override;
  std::vector<double> cross_score(std::span<const TextPair> pairs, const std::string& model) override;

  static std::vector<std::string> split_tokens(std::string_view text);

 private:
  ModelSpec require(const std::string& alias, ModelKind kind);
  std::vector<double> token_vector(const std::string& token, int layer) const;
  std::vector<double> sentence_vector(const std::string& text) const;

  Options options_;
};

/// "synthetic" or "synthetic://" yields a SyntheticBackend; anything else is
/// treated as the base URL of an HTTP sidecar.
std::unique_ptr<ModelBackend> make_backend(const std::string& url);

}  // namespace anssim
