#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "anssim/embedding.hpp"
#include "anssim/model_backend.hpp"

namespace anssim {

/// Layer used by the vanilla BERTScore configuration.
inline constexpr int kVanillaBertScoreLayer = 2;

struct IdfTable {
  std::unordered_map<std::string, double> weights;
  double default_weight = 0.0;

  double weight(const std::string& token) const;
};

struct BertScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  /// Set when either side produced no tokens; all three scores are then 0.
  bool empty_tokenization = false;
};

/// Cosine similarity clamped to [-1, 1]. Throws ZeroVector or DimensionMismatch.
double cosine(std::span<const double> u, std::span<const double> v);

/// Greedy max-cosine matching over two token embedding matrices. Rows are
/// normalized first and negative similarities count as 0. Without an IDF
/// table every token weighs 1.
BertScore bertscore_from_embeddings(const TokenEmbeddingMatrix& candidate,
                                    const TokenEmbeddingMatrix& reference,
                                    const IdfTable* idf = nullptr);

/// Throws LayerOutOfRange unless 0 <= layer <= the model's layer count.
BertScore bertscore(const std::string& candidate, const std::string& reference, ModelBackend& backend,
                    const std::string& model, int layer, const IdfTable* idf = nullptr);

/// BERTScore of every pair at every requested layer with one backend request.
/// result[i][k] belongs to pairs[i] and layers[k].
std::vector<std::vector<BertScore>> bertscore_batch(std::span<const TextPair> pairs, ModelBackend& backend,
                                                    const std::string& model, std::span<const int> layers,
                                                    const IdfTable* idf = nullptr);

/// Cosine of the two sentence embeddings with negatives mapped to 0.
double bi_encoder_score(const std::string& a, const std::string& b, ModelBackend& backend,
                        const std::string& model);
std::vector<double> bi_encoder_batch(std::span<const TextPair> pairs, ModelBackend& backend,
                                     const std::string& model);

/// Cross-encoder output for the ordered pair, clamped to [0, 1].
double sas_score(const std::string& a, const std::string& b, ModelBackend& backend, const std::string& model);
std::vector<double> sas_batch(std::span<const TextPair> pairs, ModelBackend& backend, const std::string& model);

using Tokenizer = std::function<std::vector<std::string>(std::string_view)>;

/// idf(t) = log((N + 1) / (df(t) + 1)); unseen tokens get log(N + 1).
/// Throws EmptyCorpus.
IdfTable build_idf_table(std::span<const std::string> corpus, const Tokenizer& tokenizer);

/// Same, using the model's own tokenization as reported by embed_tokens.
IdfTable build_idf_table(std::span<const std::string> corpus, ModelBackend& backend, const std::string& model);

}  // namespace anssim
