#include <httplib.h>

#include <json.hpp>

#include "anssim/error.hpp"
#include "anssim/model_backend.hpp"

namespace anssim {

using nlohmann::json;

namespace {

std::string strip_trailing_slash(std::string url) {
  while (!url.empty() && url.back() == '/') url.pop_back();
  return url;
}

[[noreturn]] void fail(ErrorCode code, const std::string& context, const std::string& detail) {
  throw Error(code, context + ": " + detail);
}

// Server-side failures carry {"error": "<Code>", "detail": "..."}.
ErrorCode code_from_body(const std::string& body) {
  const json doc = json::parse(body, nullptr, false);
  if (doc.is_object() && doc.contains("error") && doc["error"].is_string()) {
    const std::string name = doc["error"].get<std::string>();
    if (name == "UnknownModel") return ErrorCode::UnknownModel;
    if (name == "LayerOutOfRange") return ErrorCode::LayerOutOfRange;
  }
  return ErrorCode::BackendError;
}

json parse_body(const std::string& body, const std::string& context) {
  json doc = json::parse(body, nullptr, false);
  if (doc.is_discarded()) fail(ErrorCode::BackendError, context, "response is not valid JSON");
  return doc;
}

std::vector<double> to_vector(const json& row, const std::string& context) {
  if (!row.is_array()) fail(ErrorCode::BackendError, context, "expected an array of numbers");
  std::vector<double> out;
  out.reserve(row.size());
  for (const auto& v : row) {
    if (!v.is_number()) fail(ErrorCode::BackendError, context, "non-numeric vector entry");
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace

HttpBackend::HttpBackend(std::string base_url, HttpBackendOptions options)
    : base_url_(strip_trailing_slash(std::move(base_url))), options_(options) {}

std::string HttpBackend::post(const std::string& path, const std::string& body, const std::string& model) {
  const std::string context = "POST " + path + " model=" + model;
  httplib::Client client(base_url_);
  client.set_connection_timeout(options_.connect_timeout);
  client.set_read_timeout(options_.read_timeout);
  auto res = client.Post(path, body, "application/json");
  if (!res) {
    fail(ErrorCode::BackendUnreachable, context,
         "cannot reach " + base_url_ + " (" + httplib::to_string(res.error()) + ")");
  }
  if (res->status != 200) {
    fail(code_from_body(res->body), context, "HTTP " + std::to_string(res->status) + ": " + res->body);
  }
  return res->body;
}

std::vector<ModelSpec> HttpBackend::models() {
  const std::string context = "GET /v1/models";
  httplib::Client client(base_url_);
  client.set_connection_timeout(options_.connect_timeout);
  client.set_read_timeout(options_.read_timeout);
  auto res = client.Get("/v1/models");
  if (!res) {
    fail(ErrorCode::BackendUnreachable, context,
         "cannot reach " + base_url_ + " (" + httplib::to_string(res.error()) + ")");
  }
  if (res->status != 200) fail(ErrorCode::BackendError, context, "HTTP " + std::to_string(res->status));

  const json doc = parse_body(res->body, context);
  const json& roster = doc.is_object() && doc.contains("models") ? doc["models"] : doc;
  if (!roster.is_array()) fail(ErrorCode::BackendError, context, "roster is not a list");

  std::vector<ModelSpec> out;
  for (const auto& entry : roster) {
    if (!entry.is_object() || !entry.contains("alias") || !entry.contains("kind")) {
      fail(ErrorCode::BackendError, context, "roster entry lacks alias or kind");
    }
    ModelSpec spec;
    spec.alias = entry["alias"].get<std::string>();
    spec.hub_id = entry.value("hub_id", std::string{});
    const auto kind = parse_model_kind(entry["kind"].get<std::string>());
    if (!kind) fail(ErrorCode::BackendError, context, "unknown model kind for '" + spec.alias + "'");
    spec.kind = *kind;
    spec.num_layers = entry.value("num_layers", 0);
    spec.dim = entry.value("dim", 0);
    spec.snapshot = entry.value("snapshot", std::string{});
    out.push_back(std::move(spec));
  }
  return out;
}

std::vector<TokenEmbeddingResult> HttpBackend::embed_tokens(std::span<const std::string> texts,
                                                            const std::string& model,
                                                            std::span<const int> layers) {
  if (texts.empty()) return {};
  const std::string context = "POST /v1/embed_tokens model=" + model;
  const json request = {{"model", model},
                        {"texts", std::vector<std::string>(texts.begin(), texts.end())},
                        {"layers", std::vector<int>(layers.begin(), layers.end())}};
  const json doc = parse_body(post("/v1/embed_tokens", request.dump(), model), context);
  if (!doc.contains("results") || !doc["results"].is_array() || doc["results"].size() != texts.size()) {
    fail(ErrorCode::BackendError, context, "expected one result per input text");
  }

  std::vector<TokenEmbeddingResult> out;
  out.reserve(texts.size());
  for (const auto& item : doc["results"]) {
    TokenEmbeddingResult result;
    result.tokens = item.value("tokens", std::vector<std::string>{});
    result.truncated = item.value("truncated", false);
    if (!item.contains("layers") || !item["layers"].is_object()) {
      fail(ErrorCode::BackendError, context, "result lacks a layers object");
    }
    for (const int layer : layers) {
      const std::string key = std::to_string(layer);
      if (!item["layers"].contains(key)) {
        fail(ErrorCode::BackendError, context, "result lacks layer " + key);
      }
      const json& rows = item["layers"][key];
      if (!rows.is_array() || rows.size() != result.tokens.size()) {
        fail(ErrorCode::BackendError, context, "layer " + key + " row count differs from token count");
      }
      std::vector<double> values;
      std::size_t dim = 0;
      for (std::size_t r = 0; r < rows.size(); ++r) {
        std::vector<double> v = to_vector(rows[r], context);
        if (r == 0) dim = v.size();
        if (v.size() != dim) fail(ErrorCode::BackendError, context, "ragged embedding rows");
        values.insert(values.end(), v.begin(), v.end());
      }
      result.layers.emplace(layer, TokenEmbeddingMatrix(result.tokens, std::move(values), dim, layer));
    }
    out.push_back(std::move(result));
  }
  return out;
}

std::vector<SentenceEmbedding> HttpBackend::embed_sentence(std::span<const std::string> texts,
                                                           const std::string& model) {
  if (texts.empty()) return {};
  const std::string context = "POST /v1/embed_sentence model=" + model;
  const json request = {{"model", model}, {"texts", std::vector<std::string>(texts.begin(), texts.end())}};
  const json doc = parse_body(post("/v1/embed_sentence", request.dump(), model), context);
  if (!doc.contains("vectors") || !doc["vectors"].is_array() || doc["vectors"].size() != texts.size()) {
    fail(ErrorCode::BackendError, context, "expected one vector per input text");
  }
  std::vector<SentenceEmbedding> out;
  out.reserve(texts.size());
  for (const auto& v : doc["vectors"]) out.push_back(SentenceEmbedding{to_vector(v, context), true});
  return out;
}

std::vector<double> HttpBackend::cross_score(std::span<const TextPair> pairs, const std::string& model) {
  if (pairs.empty()) return {};
  const std::string context = "POST /v1/cross_score model=" + model;
  json wire_pairs = json::array();
  for (const auto& [a, b] : pairs) wire_pairs.push_back(json::array({a, b}));
  const json request = {{"model", model}, {"pairs", wire_pairs}};
  const json doc = parse_body(post("/v1/cross_score", request.dump(), model), context);
  if (!doc.contains("scores") || doc["scores"].size() != pairs.size()) {
    fail(ErrorCode::BackendError, context, "expected one score per pair");
  }
  return to_vector(doc["scores"], context);
}

}  // namespace anssim
