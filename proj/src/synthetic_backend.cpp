#include <cctype>
#include <cmath>
#include <random>

#include "anssim/error.hpp"
#include "anssim/hash.hpp"
#include "anssim/model_backend.hpp"

namespace anssim {

namespace {

void normalize_in_place(std::vector<double>& v) {
  double sq = 0.0;
  for (const double x : v) sq += x * x;
  const double norm = std::sqrt(sq);
  if (norm > 0.0) {
    for (double& x : v) x /= norm;
  }
}

}  // namespace

SyntheticBackend::SyntheticBackend() : SyntheticBackend(Options{}) {}

SyntheticBackend::SyntheticBackend(Options options) : options_(std::move(options)) {}

std::vector<ModelSpec> SyntheticBackend::models() {
  std::vector<ModelSpec> out;
  auto add = [&](const std::vector<std::string>& aliases, ModelKind kind) {
    for (const auto& alias : aliases) {
      out.push_back(ModelSpec{alias, "synthetic/" + alias, kind, options_.num_layers, options_.dim, "synthetic-v1"});
    }
  };
  add(options_.token_aliases, ModelKind::TokenEncoder);
  add(options_.sentence_aliases, ModelKind::SentenceEncoder);
  add(options_.cross_aliases, ModelKind::CrossEncoder);
  return out;
}

ModelSpec SyntheticBackend::require(const std::string& alias, ModelKind kind) {
  const ModelSpec spec = model(alias);
  if (spec.kind != kind) {
    throw Error(ErrorCode::BackendError,
                "model '" + alias + "' is a " + std::string(to_string(spec.kind)) + ", not a " +
                    std::string(to_string(kind)));
  }
  return spec;
}

std::vector<std::string> SyntheticBackend::split_tokens(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (const char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (c >= 0x80 || std::isalnum(c)) {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::vector<double> SyntheticBackend::token_vector(const std::string& token, int layer) const {
  std::mt19937_64 rng(fnv1a64(token) ^ (0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(layer + 1)));
  std::vector<double> v(static_cast<std::size_t>(options_.dim));
  for (double& x : v) x = static_cast<double>(rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0;
  normalize_in_place(v);
  return v;
}

std::vector<double> SyntheticBackend::sentence_vector(const std::string& text) const {
  std::vector<double> mean(static_cast<std::size_t>(options_.dim), 0.0);
  for (const auto& token : split_tokens(text)) {
    const auto v = token_vector(token, options_.num_layers);
    for (std::size_t k = 0; k < v.size(); ++k) mean[k] += v[k];
  }
  double sq = 0.0;
  for (const double x : mean) sq += x * x;
  if (sq == 0.0) return token_vector(std::string("\x01<empty>"), options_.num_layers);
  normalize_in_place(mean);
  return mean;
}

std::vector<TokenEmbeddingResult> SyntheticBackend::embed_tokens(std::span<const std::string> texts,
                                                                 const std::string& model,
                                                                 std::span<const int> layers) {
  const ModelSpec spec = require(model, ModelKind::TokenEncoder);
  for (const int layer : layers) {
    if (layer < 0 || layer > spec.num_layers) {
      throw Error(ErrorCode::LayerOutOfRange, "layer " + std::to_string(layer) + " outside [0, " +
                                                  std::to_string(spec.num_layers) + "] for '" + model + "'");
    }
  }
  std::vector<TokenEmbeddingResult> out;
  out.reserve(texts.size());
  for (const auto& text : texts) {
    TokenEmbeddingResult result;
    result.tokens = split_tokens(text);
    for (const int layer : layers) {
      std::vector<double> values;
      values.reserve(result.tokens.size() * static_cast<std::size_t>(spec.dim));
      for (const auto& token : result.tokens) {
        const auto v = token_vector(token, layer);
        values.insert(values.end(), v.begin(), v.end());
      }
      result.layers.emplace(layer, TokenEmbeddingMatrix(result.tokens, std::move(values),
                                                        static_cast<std::size_t>(spec.dim), layer));
    }
    out.push_back(std::move(result));
  }
  return out;
}

std::vector<SentenceEmbedding> SyntheticBackend::embed_sentence(std::span<const std::string> texts,
                                                                const std::string& model) {
  require(model, ModelKind::SentenceEncoder);
  std::vector<SentenceEmbedding> out;
  out.reserve(texts.size());
  for (const auto& text : texts) out.push_back(SentenceEmbedding{sentence_vector(text), true});
  return out;
}

std::vector<double> SyntheticBackend::cross_score(std::span<const TextPair> pairs, const std::string& model) {
  require(model, ModelKind::CrossEncoder);
  std::vector<double> out;
  out.reserve(pairs.size());
  for (const auto& [a, b] : pairs) {
    const auto u = sentence_vector(a);
    const auto v = sentence_vector(b);
    double dot = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) dot += u[k] * v[k];
    out.push_back(dot);
  }
  return out;
}

}  // namespace anssim
