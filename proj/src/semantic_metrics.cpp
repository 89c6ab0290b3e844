#include "anssim/semantic_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "anssim/error.hpp"

namespace anssim {

namespace {

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

// Weighted mean over `from` rows of the best (floored) cosine against `to`.
// Both matrices must be row-normalized.
double greedy_side(const TokenEmbeddingMatrix& from, const TokenEmbeddingMatrix& to, const IdfTable* idf) {
  double weighted = 0.0;
  double total_weight = 0.0;
  for (std::size_t i = 0; i < from.rows(); ++i) {
    const auto u = from.row(i);
    double best = 0.0;
    for (std::size_t j = 0; j < to.rows(); ++j) {
      const auto v = to.row(j);
      double dot = 0.0;
      for (std::size_t k = 0; k < u.size(); ++k) dot += u[k] * v[k];
      best = std::max(best, std::clamp(dot, -1.0, 1.0));
    }
    const double w = idf ? idf->weight(from.tokens()[i]) : 1.0;
    weighted += w * best;
    total_weight += w;
  }
  return total_weight > 0.0 ? clamp01(weighted / total_weight) : 0.0;
}

void check_finite(double v, const std::string& context) {
  if (!std::isfinite(v)) throw Error(ErrorCode::BackendError, context + ": non-finite score from backend");
}

}  // namespace

double IdfTable::weight(const std::string& token) const {
  const auto it = weights.find(token);
  return it == weights.end() ? default_weight : it->second;
}

double cosine(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                "vector sizes " + std::to_string(u.size()) + " and " + std::to_string(v.size()) + " differ");
  }
  double dot = 0.0;
  double uu = 0.0;
  double vv = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    dot += u[k] * v[k];
    uu += u[k] * u[k];
    vv += v[k] * v[k];
  }
  if (uu == 0.0 || vv == 0.0) throw Error(ErrorCode::ZeroVector, "cosine of an all-zero vector");
  return std::clamp(dot / (std::sqrt(uu) * std::sqrt(vv)), -1.0, 1.0);
}

BertScore bertscore_from_embeddings(const TokenEmbeddingMatrix& candidate, const TokenEmbeddingMatrix& reference,
                                    const IdfTable* idf) {
  BertScore out;
  if (candidate.rows() == 0 || reference.rows() == 0) {
    out.empty_tokenization = true;
    return out;
  }
  if (candidate.dim() != reference.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "candidate and reference embeddings differ in dimension");
  }
  std::optional<TokenEmbeddingMatrix> cand_copy;
  std::optional<TokenEmbeddingMatrix> ref_copy;
  const TokenEmbeddingMatrix& cand = candidate.normalized() ? candidate : cand_copy.emplace(candidate.row_normalized());
  const TokenEmbeddingMatrix& ref = reference.normalized() ? reference : ref_copy.emplace(reference.row_normalized());
  out.recall = greedy_side(ref, cand, idf);
  out.precision = greedy_side(cand, ref, idf);
  const double sum = out.precision + out.recall;
  out.f1 = sum > 0.0 ? clamp01(2.0 * out.precision * out.recall / sum) : 0.0;
  return out;
}

std::vector<std::vector<BertScore>> bertscore_batch(std::span<const TextPair> pairs, ModelBackend& backend,
                                                    const std::string& model, std::span<const int> layers,
                                                    const IdfTable* idf) {
  if (pairs.empty()) return {};
  const ModelSpec spec = backend.model(model);
  if (spec.kind != ModelKind::TokenEncoder) {
    throw Error(ErrorCode::BackendError, "model '" + model + "' is not a token encoder");
  }
  for (const int layer : layers) {
    if (layer < 0 || layer > spec.num_layers) {
      throw Error(ErrorCode::LayerOutOfRange, "layer " + std::to_string(layer) + " outside [0, " +
                                                  std::to_string(spec.num_layers) + "] for '" + model + "'");
    }
  }

  std::vector<std::string> texts;
  texts.reserve(pairs.size() * 2);
  for (const auto& [a, b] : pairs) {
    texts.push_back(a);
    texts.push_back(b);
  }
  const auto results = backend.embed_tokens(texts, model, layers);
  if (results.size() != texts.size()) {
    throw Error(ErrorCode::BackendError, "embed_tokens model=" + model + ": result count mismatch");
  }

  std::vector<std::vector<BertScore>> out(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& cand = results[2 * i];
    const auto& ref = results[2 * i + 1];
    for (const int layer : layers) {
      const auto ci = cand.layers.find(layer);
      const auto ri = ref.layers.find(layer);
      if (ci == cand.layers.end() || ri == ref.layers.end()) {
        throw Error(ErrorCode::BackendError,
                    "embed_tokens model=" + model + ": missing layer " + std::to_string(layer));
      }
      out[i].push_back(bertscore_from_embeddings(ci->second, ri->second, idf));
    }
  }
  return out;
}

BertScore bertscore(const std::string& candidate, const std::string& reference, ModelBackend& backend,
                    const std::string& model, int layer, const IdfTable* idf) {
  const TextPair pair{candidate, reference};
  const int layers[] = {layer};
  return bertscore_batch(std::span(&pair, 1), backend, model, layers, idf).front().front();
}

std::vector<double> bi_encoder_batch(std::span<const TextPair> pairs, ModelBackend& backend,
                                     const std::string& model) {
  if (pairs.empty()) return {};
  std::vector<std::string> texts;
  texts.reserve(pairs.size() * 2);
  for (const auto& [a, b] : pairs) {
    texts.push_back(a);
    texts.push_back(b);
  }
  const auto vectors = backend.embed_sentence(texts, model);
  if (vectors.size() != texts.size()) {
    throw Error(ErrorCode::BackendError, "embed_sentence model=" + model + ": result count mismatch");
  }
  std::vector<double> out;
  out.reserve(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    out.push_back(std::max(0.0, cosine(vectors[2 * i].vector, vectors[2 * i + 1].vector)));
  }
  return out;
}

double bi_encoder_score(const std::string& a, const std::string& b, ModelBackend& backend,
                        const std::string& model) {
  const TextPair pair{a, b};
  return bi_encoder_batch(std::span(&pair, 1), backend, model).front();
}

std::vector<double> sas_batch(std::span<const TextPair> pairs, ModelBackend& backend, const std::string& model) {
  if (pairs.empty()) return {};
  std::vector<double> raw = backend.cross_score(pairs, model);
  if (raw.size() != pairs.size()) {
    throw Error(ErrorCode::BackendError, "cross_score model=" + model + ": result count mismatch");
  }
  for (double& v : raw) {
    check_finite(v, "cross_score model=" + model);
    v = clamp01(v);
  }
  return raw;
}

double sas_score(const std::string& a, const std::string& b, ModelBackend& backend, const std::string& model) {
  const TextPair pair{a, b};
  return sas_batch(std::span(&pair, 1), backend, model).front();
}

IdfTable build_idf_table(std::span<const std::string> corpus, const Tokenizer& tokenizer) {
  if (corpus.empty()) throw Error(ErrorCode::EmptyCorpus, "IDF corpus is empty");
  std::unordered_map<std::string, std::size_t> df;
  for (const auto& doc : corpus) {
    const auto tokens = tokenizer(doc);
    for (const auto& t : std::set<std::string>(tokens.begin(), tokens.end())) ++df[t];
  }
  const double n = static_cast<double>(corpus.size());
  IdfTable table;
  table.default_weight = std::log(n + 1.0);
  for (const auto& [token, count] : df) {
    table.weights.emplace(token, std::log((n + 1.0) / (static_cast<double>(count) + 1.0)));
  }
  return table;
}

IdfTable build_idf_table(std::span<const std::string> corpus, ModelBackend& backend, const std::string& model) {
  if (corpus.empty()) throw Error(ErrorCode::EmptyCorpus, "IDF corpus is empty");
  const int layers[] = {0};
  const auto results = backend.embed_tokens(corpus, model, layers);
  std::vector<std::vector<std::string>> token_lists;
  token_lists.reserve(results.size());
  for (const auto& r : results) token_lists.push_back(r.tokens);
  std::size_t next = 0;
  return build_idf_table(corpus, [&](std::string_view) { return token_lists.at(next++); });
}

}  // namespace anssim
